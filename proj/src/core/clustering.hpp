#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"

namespace mncscl {

/// Interpretation of sim(.,.) in the soft assignment: Distance uses the
/// squared Euclidean distance (soft-min), Literal uses the dot-product
/// similarity exactly as a similarity score.
enum class SimilaritySign { Distance, Literal };

struct ClusterState {
    Matrix centers;      // C x F', detached
    Matrix assignments;  // N x C, rows sum to 1, detached
    double beta = 10.0;
    int iters = 10;
};

Matrix kmeanspp_init(const Matrix& x, int c, std::uint64_t seed);

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are
/// re-seeded to the point farthest from its assigned center.
std::vector<int> kmeans_hard(const Matrix& x, int c, std::uint64_t seed, int max_iter = 100);

/// Detached alternating refinement: `iters` rounds of assignment (soft)
/// followed by center update, starting from init_centers.
ClusterState soft_kmeans(const Matrix& h, int c, double beta, int iters,
                         const Matrix& init_centers,
                         SimilaritySign sign = SimilaritySign::Distance);

/// Final differentiable round: assignments from warm centers, then one
/// center update, both recorded on the tape.
struct SoftAssignResult {
    Tensor assignments;  // N x C
    Tensor centers;      // C x F'
};
SoftAssignResult soft_assign_on_tape(Tape& tape, const Tensor& h, const Matrix& warm_centers,
                                     double beta, SimilaritySign sign = SimilaritySign::Distance);

/// Two-layer estimation network predicting cluster assignments.
struct EstimationParams {
    Matrix w1;     // F' x hidden
    Matrix b1;     // 1 x hidden
    Matrix slope;  // 1 x 1 (PReLU)
    Matrix w2;     // hidden x C
    Matrix b2;     // 1 x C

    static EstimationParams init(int in_dim, int hidden, int clusters, std::uint64_t seed);
};

struct EstimationLeaves {
    Tensor w1, b1, slope, w2, b2;
};

Tensor estimation_network(Tape& tape, const Tensor& h, const EstimationLeaves& theta);

}  // namespace mncscl
