#include "core/clustering.hpp"

#include <limits>
#include <random>
#include <stdexcept>

#include "core/init.hpp"

namespace mncscl {

namespace {

Matrix similarity_logits(const Matrix& h, const Matrix& centers, double beta,
                         SimilaritySign sign) {
    if (sign == SimilaritySign::Distance) {
        Vector hn = h.rowwise().squaredNorm();
        Vector cn = centers.rowwise().squaredNorm();
        Matrix d = -2.0 * h * centers.transpose();
        d.colwise() += hn;
        d.rowwise() += cn.transpose();
        return -beta * d.cwiseMax(0.0);
    }
    // literal reading: exp(-beta * sim) with sim a dot-product similarity
    return -beta * (h * centers.transpose());
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (int i = 0; i < logits.rows(); ++i) {
        Eigen::RowVectorXd row = logits.row(i);
        Eigen::RowVectorXd e = (row.array() - row.maxCoeff()).exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

int farthest_point(const Matrix& x, const Matrix& centers) {
    int best = 0;
    double best_d = -1.0;
    for (int i = 0; i < x.rows(); ++i) {
        double nearest = std::numeric_limits<double>::max();
        for (int c = 0; c < centers.rows(); ++c)
            nearest = std::min(nearest, (x.row(i) - centers.row(c)).squaredNorm());
        if (nearest > best_d) {
            best_d = nearest;
            best = i;
        }
    }
    return best;
}

}  // namespace

Matrix kmeanspp_init(const Matrix& x, int c, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    if (c > n) throw std::invalid_argument("more clusters than points");
    std::mt19937_64 rng(seed);
    Matrix centers(c, x.cols());
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.row(0) = x.row(first(rng));
    Vector d2(n);
    for (int k = 1; k < c; ++k) {
        for (int i = 0; i < n; ++i) {
            double nearest = std::numeric_limits<double>::max();
            for (int j = 0; j < k; ++j)
                nearest = std::min(nearest, (x.row(i) - centers.row(j)).squaredNorm());
            d2[i] = nearest;
        }
        double total = d2.sum();
        if (total <= 0.0) {
            // all remaining points coincide with chosen centers
            centers.row(k) = x.row(k % n);
            continue;
        }
        std::uniform_real_distribution<double> unif(0.0, total);
        double target = unif(rng);
        int pick = n - 1;
        double run = 0.0;
        for (int i = 0; i < n; ++i) {
            run += d2[i];
            if (run >= target) {
                pick = i;
                break;
            }
        }
        centers.row(k) = x.row(pick);
    }
    return centers;
}

std::vector<int> kmeans_hard(const Matrix& x, int c, std::uint64_t seed, int max_iter) {
    const int n = static_cast<int>(x.rows());
    if (c > n) throw std::invalid_argument("more clusters than points");
    Matrix centers = kmeanspp_init(x, c, seed);
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (int k = 0; k < c; ++k) {
                double d = (x.row(i) - centers.row(k)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        Matrix sums = Matrix::Zero(c, x.cols());
        std::vector<int> counts(c, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(assign[i]) += x.row(i);
            ++counts[assign[i]];
        }
        for (int k = 0; k < c; ++k) {
            if (counts[k] == 0) {
                centers.row(k) = x.row(farthest_point(x, centers));
                changed = true;
            } else {
                centers.row(k) = sums.row(k) / counts[k];
            }
        }
        if (!changed && iter > 0) break;
    }
    return assign;
}

ClusterState soft_kmeans(const Matrix& h, int c, double beta, int iters,
                         const Matrix& init_centers, SimilaritySign sign) {
    if (c > h.rows()) throw std::invalid_argument("more clusters than points");
    if (beta < 0) throw std::invalid_argument("negative beta");
    ClusterState state;
    state.beta = beta;
    state.iters = iters;
    state.centers = init_centers;
    state.assignments = Matrix::Constant(h.rows(), c, 1.0 / c);
    for (int it = 0; it < iters; ++it) {
        state.assignments = softmax_rows(similarity_logits(h, state.centers, beta, sign));
        Vector mass = state.assignments.colwise().sum();
        for (int k = 0; k < c; ++k) {
            if (mass[k] < 1e-12) {
                state.centers.row(k) = h.row(farthest_point(h, state.centers));
            } else {
                state.centers.row(k) = (state.assignments.col(k).transpose() * h) / mass[k];
            }
        }
    }
    return state;
}

SoftAssignResult soft_assign_on_tape(Tape& tape, const Tensor& h, const Matrix& warm_centers,
                                     double beta, SimilaritySign sign) {
    Tensor centers_const(warm_centers);
    Tensor logits;
    if (sign == SimilaritySign::Distance) {
        logits = tape.scale(tape.pairwise_sqdist(h, centers_const), -beta);
    } else {
        logits = tape.scale(tape.matmul(h, tape.transpose(centers_const)), -beta);
    }
    Tensor gamma = tape.row_softmax(logits);
    Tensor gamma_t = tape.transpose(gamma);
    Tensor mass = tape.add(tape.row_sums(gamma_t), Tensor::scalar(1e-12));
    Tensor centers = tape.div_rows(tape.matmul(gamma_t, h), mass);
    return {gamma, centers};
}

EstimationParams EstimationParams::init(int in_dim, int hidden, int clusters,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    EstimationParams p;
    p.w1 = glorot_uniform(in_dim, hidden, rng);
    p.b1 = Matrix::Zero(1, hidden);
    p.slope = Matrix::Constant(1, 1, 0.25);
    p.w2 = glorot_uniform(hidden, clusters, rng);
    p.b2 = Matrix::Zero(1, clusters);
    return p;
}

Tensor estimation_network(Tape& tape, const Tensor& h, const EstimationLeaves& theta) {
    Tensor hidden = tape.prelu(tape.add(tape.matmul(h, theta.w1), theta.b1), theta.slope);
    Tensor logits = tape.add(tape.matmul(hidden, theta.w2), theta.b2);
    return tape.row_softmax(logits);
}

}  // namespace mncscl
