#include "core/diffusion.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mncscl {

DiffusionMatrix ppr_matrix(const SparseMatrix& abar, double alpha) {
    if (abar.rows() != abar.cols()) throw std::invalid_argument("ppr: square matrix required");
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("ppr: alpha outside (0,1]");
    const int n = abar.rows();
    Matrix system = Matrix::Identity(n, n) - (1.0 - alpha) * abar.to_dense();
    Eigen::PartialPivLU<Matrix> lu(system);
    DiffusionMatrix out;
    out.values = alpha * lu.solve(Matrix::Identity(n, n));
    out.kind = DiffusionKind::Ppr;
    out.param = alpha;
    return out;
}

DiffusionMatrix heat_matrix(const SparseMatrix& abar, double t, int order) {
    if (t < 0) throw std::invalid_argument("heat: negative diffusion time");
    if (order < 1) throw std::invalid_argument("heat: order must be >= 1");
    const int n = abar.rows();
    const double et = std::exp(-t);
    Matrix term = Matrix::Identity(n, n);  // Abar^k t^k/k!, starting at k=0
    Matrix acc = term;
    double coeff_sum = 1.0;  // sum of t^k/k! accumulated so far
    double coeff = 1.0;
    for (int k = 1; k <= order; ++k) {
        term = abar.multiply(term) * (t / k);
        acc += term;
        coeff *= t / k;
        coeff_sum += coeff;
    }
    DiffusionMatrix out;
    out.values = et * acc;
    out.kind = DiffusionKind::Heat;
    out.param = t;
    // tail of the scalar series e^{-t} sum_{k>order} t^k/k!
    out.series_tail = 1.0 - et * coeff_sum;
    return out;
}

SparseMatrix sparsify_topk(const DiffusionMatrix& m, int k) {
    if (k < 1) throw std::invalid_argument("sparsify_topk: k must be >= 1");
    const int n = static_cast<int>(m.values.rows());
    std::vector<std::tuple<int, int, double>> triplets;
    std::vector<int> order(n);
    for (int c = 0; c < static_cast<int>(m.values.cols()); ++c) {
        std::iota(order.begin(), order.end(), 0);
        const auto& col = m.values;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return col(a, c) > col(b, c);  // stable: ties keep lower row index first
        });
        const int keep = std::min(k, n);
        double mass = 0.0;
        for (int i = 0; i < keep; ++i) mass += col(order[i], c);
        if (mass <= 0.0) continue;
        for (int i = 0; i < keep; ++i) {
            double v = col(order[i], c);
            if (v != 0.0) triplets.emplace_back(order[i], c, v / mass);
        }
    }
    return SparseMatrix::from_triplets(n, static_cast<int>(m.values.cols()), std::move(triplets));
}

IndexSet top_rank(const Eigen::RowVectorXd& scores, int l) {
    if (l < 1) throw std::invalid_argument("top_rank: l must be >= 1");
    const int n = static_cast<int>(scores.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    order.resize(std::min(l, n));
    return IndexSet(std::move(order));
}

}  // namespace mncscl
