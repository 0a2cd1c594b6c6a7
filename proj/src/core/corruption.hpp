#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/graph.hpp"

namespace mncscl {

enum class CorruptionMode { Diffusion, Shuffle, DiffusionPlusShuffle, CrossGraph };

CorruptionMode corruption_mode_from_string(const std::string& s);
std::string to_string(CorruptionMode m);

/// Negative-example graph: corrupted features plus the propagation
/// matrix the shared encoder should use for it.
struct CorruptedGraph {
    Matrix features;
    SparseMatrix adjacency;    // structure of the negative example
    SparseMatrix propagation;  // sym-normalized, ready for the encoder
    std::vector<int> feature_perm;  // row permutation applied (empty if none)
};

/// Builds the negative example. `diffused` is the sparsified heat-kernel
/// structure and is required by the diffusion modes; `pool` supplies
/// alternative graphs for the cross-graph mode.
CorruptedGraph corrupt(const Graph& g, CorruptionMode mode, const SparseMatrix* diffused,
                       std::uint64_t seed, const std::vector<const Graph*>* pool = nullptr);

}  // namespace mncscl
