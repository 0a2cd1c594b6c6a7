#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/sparse.hpp"

namespace mncscl {

/// Sorted, unique node indices.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::vector<int> ids);

    static IndexSet full(int n);
    static IndexSet single(int i) { return IndexSet(std::vector<int>{i}); }

    int size() const { return static_cast<int>(ids_.size()); }
    bool empty() const { return ids_.empty(); }
    int operator[](int k) const { return ids_[k]; }
    const std::vector<int>& ids() const { return ids_; }
    bool contains(int i) const;

    bool operator==(const IndexSet&) const = default;

private:
    std::vector<int> ids_;
};

struct Split {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

/// Attributed graph: dense features, symmetric binary adjacency,
/// optional labels and train/val/test split.
struct Graph {
    int num_nodes = 0;
    Matrix features;            // N x F
    SparseMatrix adjacency;     // N x N, symmetric, zero diagonal unless source has loops
    std::vector<int> labels;    // empty when unlabeled; class id per node
    std::vector<std::vector<int>> multilabels;  // per-node label-id list (multilabel datasets)
    std::optional<Split> split;

    int feature_dim() const { return static_cast<int>(features.cols()); }
    int num_classes() const;
    bool has_labels() const { return !labels.empty() || !multilabels.empty(); }

    void validate() const;  // throws on broken invariants
};

enum class IsolatedPolicy { SelfLoop };

Graph load_bundle(const std::string& dir);
void save_bundle(const Graph& g, const std::string& dir);

// D^{-1/2} (A+I) D^{-1/2}
SparseMatrix normalize_sym(const Graph& g);
SparseMatrix normalize_sym_weighted(const SparseMatrix& a);

// A D^{-1}, column-stochastic; isolated nodes get a self-loop first.
SparseMatrix col_normalize(const Graph& g, IsolatedPolicy policy = IsolatedPolicy::SelfLoop);
SparseMatrix col_normalize(const SparseMatrix& a, IsolatedPolicy policy = IsolatedPolicy::SelfLoop);

SparseMatrix induced_adjacency(const SparseMatrix& a, const IndexSet& idx);

IndexSet bfs_within(const Graph& g, int center, int max_hops);

Graph synth_sbm(int blocks, int per_block, double p_in, double p_out, int feat_dim,
                std::uint64_t seed);

Matrix shuffle_rows(const Matrix& x, std::uint64_t seed);
std::vector<int> shuffle_permutation(int n, std::uint64_t seed);  // identity rejected for n > 1

bool graphs_equal(const Graph& a, const Graph& b);

}  // namespace mncscl
