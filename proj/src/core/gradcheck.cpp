#include "core/gradcheck.hpp"

#include <cmath>

namespace mncscl {

namespace {

double eval_at(const CheckedComputation& comp, const std::vector<Matrix>& inputs) {
    Tape tape;
    std::vector<Tensor> leaves;
    leaves.reserve(inputs.size());
    for (const auto& m : inputs) leaves.push_back(tape.leaf(m));
    return comp.build(tape, leaves).item();
}

}  // namespace

GradCheckReport grad_check(const CheckedComputation& comp, double tolerance, double h) {
    GradCheckReport report;
    report.name = comp.name;

    Tape tape;
    std::vector<Tensor> leaves;
    for (const auto& m : comp.inputs) leaves.push_back(tape.leaf(m));
    Tensor loss = comp.build(tape, leaves);
    GradTable grads = tape.backward(loss);

    double worst = 0.0;
    for (std::size_t p = 0; p < comp.inputs.size(); ++p) {
        const Matrix& analytic = grads.at(leaves[p].node_id());
        for (int i = 0; i < comp.inputs[p].rows(); ++i) {
            for (int j = 0; j < comp.inputs[p].cols(); ++j) {
                std::vector<Matrix> probe = comp.inputs;
                probe[p](i, j) += h;
                double f_plus = eval_at(comp, probe);
                probe[p](i, j) -= 2 * h;
                double f_minus = eval_at(comp, probe);
                double numeric = (f_plus - f_minus) / (2 * h);
                double a = analytic(i, j);
                double err;
                if (std::abs(a) < 1e-6 && std::abs(numeric) < 1e-6)
                    err = std::abs(a - numeric);
                else
                    err = std::abs(a - numeric) / std::max(std::abs(a), std::abs(numeric));
                worst = std::max(worst, err);
            }
        }
    }
    report.worst_error = worst;
    report.passed = worst < tolerance;
    return report;
}

}  // namespace mncscl
