#pragma once

#include <cstdint>

#include "core/clustering.hpp"
#include "core/subgraph.hpp"
#include "core/tensor.hpp"

namespace mncscl {

enum class EncoderKind { Gcn, GcnSkip };

EncoderKind encoder_kind_from_string(const std::string& s);
std::string to_string(EncoderKind k);

/// All trainable state, detached. Leaves are registered on a fresh tape
/// each training step.
struct ModelParams {
    EncoderKind encoder = EncoderKind::Gcn;
    Matrix w;       // F x F'
    Matrix w_skip;  // F x F', empty unless skip encoder
    Matrix slope;   // 1 x 1 PReLU slope
    Matrix w_d;     // F' x F' discriminator

    CommunalStrategy strategy = CommunalStrategy::S2;
    Matrix communal_centers;  // C x F' warm start (Strategy 2), empty before first epoch
    EstimationParams est;     // Strategy 3 only
    bool has_est = false;

    static ModelParams init(int in_dim, int out_dim, EncoderKind encoder,
                            CommunalStrategy strategy, int clusters, int est_hidden,
                            std::uint64_t seed);

    int embed_dim() const { return static_cast<int>(w.cols()); }
};

/// Tape-registered views of the trainable matrices.
struct ModelLeaves {
    Tensor w, w_skip, slope, w_d;
    EstimationLeaves est;
    bool has_skip = false;
    bool has_est = false;
};

ModelLeaves register_leaves(Tape& tape, const ModelParams& params);

// H = PReLU(P X W)
Tensor encode(Tape& tape, const Tensor& x, const SparseMatrix& p, const ModelLeaves& leaves);

// H = PReLU(P X W + A_hat X W_skip); the skip term carries features.
Tensor encode_skip(Tape& tape, const Tensor& x, const SparseMatrix& p,
                   const SparseMatrix& a_hat, const ModelLeaves& leaves);

// Fast path when P X (and A_hat X) are precomputed constants.
Tensor encode_premultiplied(Tape& tape, const Matrix& px, const ModelLeaves& leaves);
Tensor encode_skip_premultiplied(Tape& tape, const Matrix& px, const Matrix& ax,
                                 const ModelLeaves& leaves);

// v = sigmoid(row mean)
Tensor readout(Tape& tape, const Tensor& h_sub);

// sigma(a W_d b^T) in (0,1)
Tensor discriminate(Tape& tape, const Tensor& a, const Tensor& b, const Tensor& w_d);

/// Per-node subgraph representation (1 x F'). Communal kinds take the
/// current assignment/center tensors.
Tensor subgraph_repr(Tape& tape, SubgraphKind kind, int node, const Tensor& h,
                     const SubgraphFamily& family, const Tensor* gamma, const Tensor* centers);

/// All nodes at once: an N x F' tensor whose row i is v_i^k.
Tensor batched_repr(Tape& tape, SubgraphKind kind, const Tensor& h, const SubgraphFamily& family,
                    const Tensor* gamma, const Tensor* centers);

}  // namespace mncscl
