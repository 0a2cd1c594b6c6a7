#include "core/subgraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace mncscl {

SubgraphKind subgraph_kind_from_string(const std::string& s) {
    if (s == "basic") return SubgraphKind::Basic;
    if (s == "neighboring") return SubgraphKind::Neighboring;
    if (s == "intimate") return SubgraphKind::Intimate;
    if (s == "communal") return SubgraphKind::Communal;
    if (s == "full") return SubgraphKind::Full;
    throw std::invalid_argument("unknown subgraph kind: '" + s + "'");
}

std::string to_string(SubgraphKind k) {
    switch (k) {
        case SubgraphKind::Basic: return "basic";
        case SubgraphKind::Neighboring: return "neighboring";
        case SubgraphKind::Intimate: return "intimate";
        case SubgraphKind::Communal: return "communal";
        case SubgraphKind::Full: return "full";
    }
    return "?";
}

IndexSet gen_basic(int i) {
    if (i < 0) throw std::out_of_range("invalid node id");
    return IndexSet::single(i);
}

IndexSet gen_neighboring(const Graph& g, int i, int d) {
    if (d < 1) throw std::invalid_argument("neighbor range must be >= 1");
    return bfs_within(g, i, d);
}

IndexSet gen_intimate(const DiffusionMatrix& s, int i, int l) {
    if (i < 0 || i >= s.values.rows()) throw std::out_of_range("invalid node id");
    return top_rank(s.values.row(i), l);
}

IndexSet gen_full(int n) {
    if (n < 1) throw std::invalid_argument("empty graph");
    return IndexSet::full(n);
}

SparseMatrix averaging_matrix(const std::vector<IndexSet>& sets, int n) {
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < static_cast<int>(sets.size()); ++i) {
        const double w = 1.0 / sets[i].size();
        for (int j : sets[i].ids()) t.emplace_back(i, j, w);
    }
    return SparseMatrix::from_triplets(static_cast<int>(sets.size()), n, std::move(t));
}

bool SubgraphFamily::has(SubgraphKind k) const {
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

SubgraphFamily build_family(const Graph& g, const std::vector<SubgraphKind>& kinds,
                            const SubgraphHyper& hyper, const DiffusionMatrix* ppr,
                            std::uint64_t cluster_seed) {
    SubgraphFamily fam;
    fam.kinds = kinds;
    fam.hyper = hyper;
    fam.num_nodes = g.num_nodes;

    if (fam.has(SubgraphKind::Neighboring)) {
        fam.neighboring.reserve(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i)
            fam.neighboring.push_back(gen_neighboring(g, i, hyper.d));
        fam.mean_neighboring = averaging_matrix(fam.neighboring, g.num_nodes);
    }
    if (fam.has(SubgraphKind::Intimate)) {
        if (!ppr) throw std::invalid_argument("intimate subgraph requires a PPR matrix");
        fam.intimate.reserve(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i)
            fam.intimate.push_back(gen_intimate(*ppr, i, hyper.l));
        fam.mean_intimate = averaging_matrix(fam.intimate, g.num_nodes);
    }
    if (fam.has(SubgraphKind::Communal) && hyper.strategy == CommunalStrategy::S1) {
        const int c = std::min(hyper.clusters, g.num_nodes);
        fam.communal_partition = kmeans_hard(g.features, c, cluster_seed);
        std::vector<std::vector<int>> members(c);
        for (int i = 0; i < g.num_nodes; ++i) members[fam.communal_partition[i]].push_back(i);
        std::vector<IndexSet> sets;
        sets.reserve(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i)
            sets.push_back(IndexSet(members[fam.communal_partition[i]]));
        fam.mean_communal = averaging_matrix(sets, g.num_nodes);
    }
    return fam;
}

}  // namespace mncscl
