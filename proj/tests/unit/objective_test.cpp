#include <doctest.h>

#include <cmath>

#include "core/objective.hpp"

using namespace mncscl;

namespace {

PairBatch random_batch(Tape& tape, int n, int f, int k, LossMode mode, std::uint64_t seed) {
    std::srand(static_cast<unsigned>(seed));
    PairBatch batch;
    batch.mode = mode;
    for (int j = 0; j < k; ++j) {
        Matrix p = (Matrix::Random(n, f).array() * 0.5 + 0.5).matrix();
        Matrix q = (Matrix::Random(n, f).array() * 0.5 + 0.5).matrix();
        batch.positives.push_back(tape.leaf(std::move(p), false));
        batch.negatives.push_back(tape.leaf(std::move(q), false));
    }
    return batch;
}

}  // namespace

TEST_CASE("zero discriminator gives ln 2 under both objectives") {
    const int n = 7, f = 4, k = 5;
    Tape tape;
    Tensor w_d = tape.leaf(Matrix::Zero(f, f));
    auto cv = loss_cv(tape, random_batch(tape, n, f, k, LossMode::CoreView, 1), w_d);
    auto fg = loss_fg(tape, random_batch(tape, n, f, k, LossMode::FullGraph, 2), w_d);
    CHECK(std::abs(cv.loss.item() - std::log(2.0)) < 1e-10);
    CHECK(std::abs(fg.loss.item() - std::log(2.0)) < 1e-10);
    CHECK(cv.term_count == 2L * n * (k - 1));
    CHECK(fg.term_count == static_cast<long>(n) * (k * (k - 1) / 2 + k));
}

TEST_CASE("term counts follow the pairing enumeration for any k") {
    const int n = 3, f = 2;
    for (int k = 2; k <= 5; ++k) {
        Tape tape;
        Tensor w_d = tape.leaf(Matrix::Zero(f, f));
        auto cv = loss_cv(tape, random_batch(tape, n, f, k, LossMode::CoreView, 3), w_d);
        auto fg = loss_fg(tape, random_batch(tape, n, f, k, LossMode::FullGraph, 4), w_d);
        CHECK(cv.term_count == 2L * n * (k - 1));
        CHECK(fg.term_count == static_cast<long>(n) * (k * (k - 1) / 2 + k));
    }
}

TEST_CASE("a discriminator that separates pairs lowers the loss below ln 2") {
    const int n = 6, f = 3;
    Tape tape;
    // positives aligned with a fixed direction, negatives orthogonal
    Matrix pos = Matrix::Zero(n, f);
    Matrix neg = Matrix::Zero(n, f);
    pos.col(0).setConstant(1.0);
    neg.col(1).setConstant(1.0);
    PairBatch batch;
    batch.mode = LossMode::CoreView;
    for (int j = 0; j < 2; ++j) {
        batch.positives.push_back(tape.leaf(pos, false));
        batch.negatives.push_back(tape.leaf(neg, false));
    }
    Matrix w = Matrix::Zero(f, f);
    w(0, 0) = 3.0;  // scores pos-pos pairs high, anything with neg zero
    Tensor w_d = tape.leaf(w);
    auto result = loss_cv(tape, batch, w_d);
    CHECK(result.loss.item() < std::log(2.0) - 0.1);
}

TEST_CASE("core-view mode requires aligned positive and negative lists") {
    Tape tape;
    PairBatch batch;
    batch.mode = LossMode::CoreView;
    batch.positives.push_back(tape.leaf(Matrix::Random(3, 2), false));
    CHECK_THROWS(loss_cv(tape, batch, tape.leaf(Matrix::Zero(2, 2))));
}

TEST_CASE("dispatcher follows the batch mode") {
    const int n = 4, f = 3, k = 3;
    Tape tape;
    Tensor w_d = tape.leaf(Matrix::Zero(f, f));
    auto via_cv = contrastive_loss(tape, random_batch(tape, n, f, k, LossMode::CoreView, 7), w_d);
    CHECK(via_cv.term_count == 2L * n * (k - 1));
    auto via_fg = contrastive_loss(tape, random_batch(tape, n, f, k, LossMode::FullGraph, 7), w_d);
    CHECK(via_fg.term_count == static_cast<long>(n) * (k * (k - 1) / 2 + k));
}

TEST_CASE("probabilities are clamped before the log") {
    const int n = 2, f = 2;
    Tape tape;
    // huge scores saturate the sigmoid; the clamp keeps the loss finite
    Matrix big = Matrix::Constant(n, f, 100.0);
    PairBatch batch;
    batch.mode = LossMode::CoreView;
    for (int j = 0; j < 2; ++j) {
        batch.positives.push_back(tape.leaf(big, false));
        batch.negatives.push_back(tape.leaf(big, false));
    }
    Tensor w_d = tape.leaf(Matrix::Identity(f, f) * 100.0);
    auto result = loss_cv(tape, batch, w_d);
    CHECK(std::isfinite(result.loss.item()));
}

TEST_CASE("loss mode names round trip") {
    CHECK(loss_mode_from_string("cv") == LossMode::CoreView);
    CHECK(loss_mode_from_string("fg") == LossMode::FullGraph);
    CHECK_THROWS(loss_mode_from_string("xx"));
}
