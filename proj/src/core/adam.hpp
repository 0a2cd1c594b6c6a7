#pragma once

#include <vector>

#include "core/sparse.hpp"

namespace mncscl {

/// Adam with bias correction. One state covers a list of parameter
/// matrices; accumulator shapes mirror parameter shapes.
struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Matrix> m;
    std::vector<Matrix> v;

    explicit AdamState(double learning_rate = 0.001) : lr(learning_rate) {}
};

void adam_step(std::vector<Matrix*> params, const std::vector<const Matrix*>& grads,
               AdamState& state);

}  // namespace mncscl
