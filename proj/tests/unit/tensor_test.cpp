#include <doctest.h>

#include "core/tensor.hpp"

using namespace mncscl;

TEST_CASE("backward through a small chain matches hand math") {
    // loss = sum(sigmoid(x * w)), d loss / d w = x^T (y (1-y))
    Tape tape;
    Matrix xv = Matrix::Random(4, 3);
    Matrix wv = Matrix::Random(3, 2);
    Tensor x = tape.leaf(xv);
    Tensor w = tape.leaf(wv);
    Tensor y = tape.sigmoid(tape.matmul(x, w));
    Tensor loss = tape.sum(y);
    GradTable grads = tape.backward(loss);

    Matrix yv = y.value();
    Matrix dy = yv.array() * (1 - yv.array());
    Matrix expected = xv.transpose() * dy;
    CHECK((grads.at(w.node_id()) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unreachable leaves get zero gradients") {
    Tape tape;
    Tensor a = tape.leaf(Matrix::Random(2, 2));
    Tensor unused = tape.leaf(Matrix::Random(3, 3));
    GradTable grads = tape.backward(tape.sum(a));
    CHECK(grads.at(unused.node_id()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((grads.at(a.node_id()).array() == 1.0).all());
}

TEST_CASE("row_softmax rows sum to one and shift is invisible") {
    Tape tape;
    Matrix logits = Matrix::Random(5, 7);
    Matrix shifted = logits;
    shifted.col(0).setConstant(0);
    shifted = logits.colwise() + Vector::Constant(5, 100.0);
    Matrix a = tape.row_softmax(tape.leaf(logits, false)).value();
    Matrix b = tape.row_softmax(tape.leaf(shifted, false)).value();
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a.row(i).sum() - 1.0) < 1e-12);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sigmoid is stable at extreme inputs") {
    Tape tape;
    Matrix x(1, 2);
    x << -1000.0, 1000.0;
    Matrix y = tape.sigmoid(tape.leaf(x, false)).value();
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == 1.0);
}

TEST_CASE("clamp blocks gradient outside the bounds") {
    Tape tape;
    Matrix x(1, 3);
    x << 0.1, 0.5, 0.9;
    Tensor lx = tape.leaf(x);
    Tensor loss = tape.sum(tape.clamp(lx, 0.25, 0.75));
    Matrix g = tape.backward(loss).at(lx.node_id());
    CHECK(g(0, 0) == 0.0);
    CHECK(g(0, 1) == 1.0);
    CHECK(g(0, 2) == 0.0);
}

TEST_CASE("permute_rows scatters gradients back through the permutation") {
    Tape tape;
    Matrix x = Matrix::Random(3, 2);
    Tensor lx = tape.leaf(x);
    std::vector<int> perm = {2, 0, 1};
    Tensor y = tape.permute_rows(lx, perm);
    for (int i = 0; i < 3; ++i)
        CHECK((y.value().row(i) - x.row(perm[i])).cwiseAbs().maxCoeff() == 0.0);
    Matrix weight(3, 2);
    weight << 1, 2, 3, 4, 5, 6;
    Tensor loss = tape.sum(tape.mul(y, Tensor(weight)));
    Matrix g = tape.backward(loss).at(lx.node_id());
    for (int i = 0; i < 3; ++i)
        CHECK((g.row(perm[i]) - weight.row(i)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("log rejects non-positive values") {
    Tape tape;
    Matrix x(1, 1);
    x << -0.5;
    CHECK_THROWS_AS((void)tape.log(tape.leaf(x)), std::domain_error);
}

TEST_CASE("gradients accumulate across reuse of the same tensor") {
    Tape tape;
    Tensor a = tape.leaf(Matrix::Constant(2, 2, 3.0));
    Tensor loss = tape.sum(tape.add(a, a));
    Matrix g = tape.backward(loss).at(a.node_id());
    CHECK((g.array() == 2.0).all());
}
