#include <doctest.h>

#include <cmath>

#include "core/adam.hpp"

using namespace mncscl;

TEST_CASE("first step moves by about lr in the gradient direction") {
    Matrix p = Matrix::Zero(2, 2);
    Matrix g(2, 2);
    g << 0.5, -3.0, 1e-3, 0.0;
    AdamState state(0.01);
    adam_step({&p}, {&g}, state);
    // bias-corrected first step is -lr * g / (|g| + eps')
    CHECK(p(0, 0) == doctest::Approx(-0.01).epsilon(1e-3));
    CHECK(p(0, 1) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(p(1, 0) == doctest::Approx(-0.01).epsilon(1e-2));
    CHECK(p(1, 1) == 0.0);
}

TEST_CASE("converges on a separable quadratic") {
    Matrix p(1, 3);
    p << 5.0, -4.0, 2.0;
    Matrix target(1, 3);
    target << 1.0, 0.5, -2.0;
    AdamState state(0.05);
    for (int i = 0; i < 2000; ++i) {
        Matrix g = p - target;
        adam_step({&p}, {&g}, state);
    }
    CHECK((p - target).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("multiple parameters keep independent moments") {
    Matrix a = Matrix::Zero(1, 1), b = Matrix::Zero(1, 1);
    Matrix ga = Matrix::Constant(1, 1, 1.0), gb = Matrix::Constant(1, 1, -1.0);
    AdamState state(0.1);
    adam_step({&a, &b}, {&ga, &gb}, state);
    adam_step({&a, &b}, {&ga, &gb}, state);
    CHECK(a(0, 0) < 0.0);
    CHECK(b(0, 0) > 0.0);
    CHECK(a(0, 0) == doctest::Approx(-b(0, 0)));
    CHECK(state.step == 2);
}

TEST_CASE("shape mismatch is rejected") {
    Matrix p = Matrix::Zero(2, 2);
    Matrix g = Matrix::Zero(3, 2);
    AdamState state;
    CHECK_THROWS((adam_step({&p}, {&g}, state)));
}
