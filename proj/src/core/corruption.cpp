#include "core/corruption.hpp"

#include <random>
#include <stdexcept>

namespace mncscl {

CorruptionMode corruption_mode_from_string(const std::string& s) {
    if (s == "diffusion") return CorruptionMode::Diffusion;
    if (s == "shuffle") return CorruptionMode::Shuffle;
    if (s == "diffusion_plus_shuffle") return CorruptionMode::DiffusionPlusShuffle;
    if (s == "crossgraph") return CorruptionMode::CrossGraph;
    throw std::invalid_argument("unknown corruption mode: '" + s + "'");
}

std::string to_string(CorruptionMode m) {
    switch (m) {
        case CorruptionMode::Diffusion: return "diffusion";
        case CorruptionMode::Shuffle: return "shuffle";
        case CorruptionMode::DiffusionPlusShuffle: return "diffusion_plus_shuffle";
        case CorruptionMode::CrossGraph: return "crossgraph";
    }
    return "?";
}

CorruptedGraph corrupt(const Graph& g, CorruptionMode mode, const SparseMatrix* diffused,
                       std::uint64_t seed, const std::vector<const Graph*>* pool) {
    CorruptedGraph out;
    switch (mode) {
        case CorruptionMode::Shuffle: {
            out.feature_perm = shuffle_permutation(g.num_nodes, seed);
            out.features.resize(g.features.rows(), g.features.cols());
            for (int i = 0; i < g.num_nodes; ++i)
                out.features.row(i) = g.features.row(out.feature_perm[i]);
            out.adjacency = g.adjacency;
            out.propagation = normalize_sym(g);
            return out;
        }
        case CorruptionMode::Diffusion: {
            if (!diffused) throw std::invalid_argument("diffusion corruption requires U");
            out.features = g.features;
            out.adjacency = *diffused;
            out.propagation = normalize_sym_weighted(*diffused);
            return out;
        }
        case CorruptionMode::DiffusionPlusShuffle: {
            if (!diffused) throw std::invalid_argument("diffusion corruption requires U");
            out.feature_perm = shuffle_permutation(g.num_nodes, seed);
            out.features.resize(g.features.rows(), g.features.cols());
            for (int i = 0; i < g.num_nodes; ++i)
                out.features.row(i) = g.features.row(out.feature_perm[i]);
            out.adjacency = *diffused;
            out.propagation = normalize_sym_weighted(*diffused);
            return out;
        }
        case CorruptionMode::CrossGraph: {
            if (!pool || pool->size() < 2)
                throw std::invalid_argument("crossgraph corruption requires a multi-graph dataset");
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<std::size_t> pick(0, pool->size() - 1);
            const Graph* other = (*pool)[pick(rng)];
            while (other == &g) other = (*pool)[pick(rng)];
            out.features = other->features;
            out.adjacency = other->adjacency;
            out.propagation = normalize_sym(*other);
            return out;
        }
    }
    throw std::logic_error("unreachable corruption mode");
}

}  // namespace mncscl
