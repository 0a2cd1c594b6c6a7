#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/clustering.hpp"
#include "core/diffusion.hpp"
#include "core/graph.hpp"

namespace mncscl {

enum class SubgraphKind { Basic, Neighboring, Intimate, Communal, Full };

SubgraphKind subgraph_kind_from_string(const std::string& s);
std::string to_string(SubgraphKind k);

enum class CommunalStrategy { S1, S2, S3 };

struct SubgraphHyper {
    int d = 1;            // neighbor range
    int l = 20;           // intimate subgraph size
    int clusters = 128;   // C
    double beta = 10.0;   // inverse temperature
    int iters = 10;       // soft k-means refinement rounds per forward
    double eta = 0.01;    // self-weighted factor for the full subgraph
    int est_hidden = 256; // estimation network hidden width
    CommunalStrategy strategy = CommunalStrategy::S2;
    SimilaritySign similarity = SimilaritySign::Distance;
};

// Index-set generators (Basic/Neighboring/Intimate/Full are precomputable).
IndexSet gen_basic(int i);
IndexSet gen_neighboring(const Graph& g, int i, int d);
IndexSet gen_intimate(const DiffusionMatrix& s, int i, int l);
IndexSet gen_full(int n);

/// Row-stochastic matrix M with M(i, j) = 1/|idx_i| for j in idx_i, so
/// M * H computes every node's readout mean in one sparse product.
SparseMatrix averaging_matrix(const std::vector<IndexSet>& sets, int n);

/// Precomputed per-node subgraph machinery for the selected kinds.
struct SubgraphFamily {
    std::vector<SubgraphKind> kinds;
    SubgraphHyper hyper;
    int num_nodes = 0;

    std::vector<IndexSet> neighboring;
    std::vector<IndexSet> intimate;
    std::vector<int> communal_partition;  // Strategy 1 only, fixed across epochs

    SparseMatrix mean_neighboring;
    SparseMatrix mean_intimate;
    SparseMatrix mean_communal;  // Strategy 1 only

    int K() const { return static_cast<int>(kinds.size()); }
    bool has(SubgraphKind k) const;
};

/// Builds all precomputable index sets. `ppr` is required when the
/// intimate kind is selected; `cluster_seed` drives Strategy 1 k-means.
SubgraphFamily build_family(const Graph& g, const std::vector<SubgraphKind>& kinds,
                            const SubgraphHyper& hyper, const DiffusionMatrix* ppr,
                            std::uint64_t cluster_seed);

}  // namespace mncscl
