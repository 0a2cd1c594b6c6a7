#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace mncscl {

/// A scalar computation over a fixed set of leaf matrices; rebuilt from
/// scratch on a fresh tape for every probe.
struct CheckedComputation {
    std::string name;
    std::vector<Matrix> inputs;
    std::function<Tensor(Tape&, const std::vector<Tensor>&)> build;  // returns scalar
};

struct GradCheckReport {
    std::string name;
    double worst_error = 0.0;  // relative, absolute when both magnitudes < 1e-6
    bool passed = false;
};

/// Compares backward() against central finite differences (step h),
/// element by element over every input.
GradCheckReport grad_check(const CheckedComputation& comp, double tolerance, double h = 1e-5);

}  // namespace mncscl
