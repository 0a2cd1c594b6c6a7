#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "core/graph.hpp"

using namespace mncscl;

namespace {

Graph path_graph(int n) {
    Graph g;
    g.num_nodes = n;
    g.features = Matrix::Identity(n, n);
    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i + 1 < n; ++i) {
        t.emplace_back(i, i + 1, 1.0);
        t.emplace_back(i + 1, i, 1.0);
    }
    g.adjacency = SparseMatrix::from_triplets(n, n, t);
    return g;
}

}  // namespace

TEST_CASE("normalize_sym is exactly symmetric") {
    Graph g = synth_sbm(3, 10, 0.4, 0.05, 8, 3);
    Matrix p = normalize_sym(g).to_dense();
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("col_normalize columns sum to one, isolated node included") {
    Graph g = path_graph(4);
    // add an isolated node
    g.num_nodes = 5;
    g.features = Matrix::Identity(5, 5);
    std::vector<std::tuple<int, int, double>> t;
    const auto& off = g.adjacency.offsets();
    const auto& ci = g.adjacency.col_indices();
    for (int r = 0; r < 4; ++r)
        for (auto k = off[r]; k < off[r + 1]; ++k) t.emplace_back(r, ci[k], 1.0);
    g.adjacency = SparseMatrix::from_triplets(5, 5, t);

    Vector sums = col_normalize(g).col_sums();
    for (int c = 0; c < 5; ++c) CHECK(std::abs(sums(c) - 1.0) < 1e-12);
}

TEST_CASE("induced adjacency of the full index set is the whole matrix") {
    Graph g = synth_sbm(2, 8, 0.5, 0.1, 4, 9);
    CHECK(induced_adjacency(g.adjacency, IndexSet::full(g.num_nodes)) == g.adjacency);
}

TEST_CASE("bfs_within is monotone in hop count") {
    Graph g = synth_sbm(3, 12, 0.3, 0.03, 4, 21);
    for (int node : {0, 5, 20}) {
        IndexSet d1 = bfs_within(g, node, 1);
        IndexSet d2 = bfs_within(g, node, 2);
        CHECK(d1.contains(node));
        for (int id : d1.ids()) CHECK(d2.contains(id));
        CHECK(d2.size() >= d1.size());
    }
}

TEST_CASE("bundle save and load is idempotent") {
    Graph g = synth_sbm(3, 6, 0.6, 0.1, 5, 4);
    auto dir = std::filesystem::temp_directory_path() / "mncscl_bundle_test";
    save_bundle(g, dir.string());
    Graph loaded = load_bundle(dir.string());
    CHECK(graphs_equal(g, loaded));
    save_bundle(loaded, dir.string());
    CHECK(graphs_equal(g, load_bundle(dir.string())));
    std::filesystem::remove_all(dir);
}

TEST_CASE("shuffle keeps the row multiset and moves at least one row") {
    Matrix x = Matrix::Random(10, 3);
    Matrix y = shuffle_rows(x, 77);
    auto sorted = [](Matrix m) {
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < m.rows(); ++i)
            rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
        std::sort(rows.begin(), rows.end());
        return rows;
    };
    CHECK(sorted(x) == sorted(y));
    CHECK((x - y).cwiseAbs().maxCoeff() > 0.0);
    CHECK((shuffle_rows(x, 77) - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthetic blocks come with a stratified split") {
    Graph g = synth_sbm(4, 25, 0.3, 0.02, 10, 12);
    REQUIRE(g.split.has_value());
    std::vector<int> seen(g.num_nodes, 0);
    for (int i : g.split->train) seen[i]++;
    for (int i : g.split->val) seen[i]++;
    for (int i : g.split->test) seen[i]++;
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    CHECK(g.num_classes() == 4);
    g.validate();
}
