#pragma once

#include "core/graph.hpp"
#include "core/sparse.hpp"

namespace mncscl {

enum class DiffusionKind { Ppr, Heat };

/// Dense column-stochastic diffusion matrix over the graph.
struct DiffusionMatrix {
    Matrix values;  // N x N
    DiffusionKind kind = DiffusionKind::Ppr;
    double param = 0.0;      // alpha for PPR, t for heat
    double series_tail = 0.0;  // truncation bound for heat (0 for PPR)
    bool sparsified = false;
};

// S = alpha (I - (1-alpha) Abar)^{-1}, dense LU solve.
DiffusionMatrix ppr_matrix(const SparseMatrix& abar, double alpha);

// U = e^{-t} sum_{k=0..order} t^k/k! Abar^k (truncated Taylor series).
DiffusionMatrix heat_matrix(const SparseMatrix& abar, double t, int order);

// Keep the k largest entries per column (ties to lower row index),
// renormalize each surviving column to sum 1.
SparseMatrix sparsify_topk(const DiffusionMatrix& m, int k);

// Indices of the l largest scores; ties broken by lower index.
IndexSet top_rank(const Eigen::RowVectorXd& scores, int l);

}  // namespace mncscl
