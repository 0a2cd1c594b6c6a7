#include "core/graph.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace mncscl {

IndexSet::IndexSet(std::vector<int> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    if (!ids_.empty() && ids_.front() < 0) throw std::out_of_range("negative node index");
}

IndexSet IndexSet::full(int n) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    return IndexSet(std::move(ids));
}

bool IndexSet::contains(int i) const {
    return std::binary_search(ids_.begin(), ids_.end(), i);
}

int Graph::num_classes() const {
    int m = 0;
    for (int y : labels) m = std::max(m, y + 1);
    for (const auto& ls : multilabels)
        for (int y : ls) m = std::max(m, y + 1);
    return m;
}

void Graph::validate() const {
    if (features.rows() != num_nodes) throw std::invalid_argument("feature row-count mismatch");
    if (adjacency.rows() != num_nodes || adjacency.cols() != num_nodes)
        throw std::invalid_argument("adjacency dimension mismatch");
    if (split) {
        for (const auto* part : {&split->train, &split->val, &split->test})
            for (int i : *part)
                if (i < 0 || i >= num_nodes) throw std::out_of_range("split index out of range");
    }
}

namespace {

int parse_int(const std::string& s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("non-integer node id: '" + s + "'");
    return v;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

Graph load_bundle(const std::string& dir) {
    const fs::path root(dir);
    const fs::path edges_path = root / "edges.tsv";
    const fs::path feats_path = root / "features.csv";
    if (!fs::exists(edges_path)) throw std::runtime_error("missing file: " + edges_path.string());
    if (!fs::exists(feats_path)) throw std::runtime_error("missing file: " + feats_path.string());

    // features define N
    std::vector<std::vector<double>> rows;
    {
        std::ifstream in(feats_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            for (const auto& tok : split_on(line, ',')) row.push_back(std::stod(tok));
            if (!rows.empty() && row.size() != rows.front().size())
                throw std::runtime_error("ragged feature rows in " + feats_path.string());
            rows.push_back(std::move(row));
        }
    }
    const int n = static_cast<int>(rows.size());
    const int f = n > 0 ? static_cast<int>(rows.front().size()) : 0;
    Graph g;
    g.num_nodes = n;
    g.features.resize(n, f);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < f; ++j) g.features(i, j) = rows[i][j];

    std::vector<std::tuple<int, int, double>> triplets;
    {
        std::ifstream in(edges_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto parts = split_on(line, '\t');
            if (parts.size() != 2) throw std::runtime_error("malformed edge line: '" + line + "'");
            int u = parse_int(parts[0]);
            int v = parse_int(parts[1]);
            if (u < 0 || v < 0 || u >= n || v >= n)
                throw std::runtime_error("feature row-count mismatch: edge id outside [0,N)");
            if (u == v) {
                triplets.emplace_back(u, v, 1.0);
            } else {
                triplets.emplace_back(u, v, 1.0);
                triplets.emplace_back(v, u, 1.0);
            }
        }
    }
    g.adjacency = SparseMatrix::from_triplets(n, n, std::move(triplets));
    // duplicate edges were summed during assembly; clamp back to binary
    {
        std::vector<std::tuple<int, int, double>> t;
        t.reserve(g.adjacency.nnz());
        const auto& off = g.adjacency.offsets();
        const auto& ci = g.adjacency.col_indices();
        for (int r = 0; r < n; ++r)
            for (auto k = off[r]; k < off[r + 1]; ++k) t.emplace_back(r, ci[k], 1.0);
        g.adjacency = SparseMatrix::from_triplets(n, n, std::move(t));
    }

    const fs::path labels_path = root / "labels.tsv";
    if (fs::exists(labels_path)) {
        std::ifstream in(labels_path);
        std::string line;
        bool multilabel = false;
        std::vector<std::pair<int, std::string>> entries;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto parts = split_on(line, '\t');
            if (parts.size() != 2) throw std::runtime_error("malformed label line: '" + line + "'");
            int node = parse_int(parts[0]);
            if (node < 0 || node >= n) throw std::runtime_error("label node id out of range");
            if (parts[1].find(',') != std::string::npos) multilabel = true;
            entries.emplace_back(node, parts[1]);
        }
        if (multilabel) {
            g.multilabels.assign(n, {});
            for (const auto& [node, val] : entries) {
                auto bits = split_on(val, ',');
                for (int b = 0; b < static_cast<int>(bits.size()); ++b)
                    if (parse_int(bits[b]) != 0) g.multilabels[node].push_back(b);
            }
        } else {
            g.labels.assign(n, -1);
            for (const auto& [node, val] : entries) g.labels[node] = parse_int(val);
        }
    }

    const fs::path splits_path = root / "splits.json";
    if (fs::exists(splits_path)) {
        std::ifstream in(splits_path);
        nlohmann::json j = nlohmann::json::parse(in);
        Split s;
        s.train = j.at("train").get<std::vector<int>>();
        s.val = j.at("val").get<std::vector<int>>();
        s.test = j.at("test").get<std::vector<int>>();
        g.split = std::move(s);
    }

    g.validate();
    return g;
}

void save_bundle(const Graph& g, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path root(dir);
    {
        std::ofstream out(root / "edges.tsv");
        const auto& off = g.adjacency.offsets();
        const auto& ci = g.adjacency.col_indices();
        for (int r = 0; r < g.num_nodes; ++r)
            for (auto k = off[r]; k < off[r + 1]; ++k)
                if (ci[k] >= r) out << r << '\t' << ci[k] << '\n';
    }
    {
        std::ofstream out(root / "features.csv");
        out.precision(17);
        for (int i = 0; i < g.num_nodes; ++i) {
            for (int j = 0; j < g.features.cols(); ++j) {
                if (j) out << ',';
                out << g.features(i, j);
            }
            out << '\n';
        }
    }
    if (!g.labels.empty()) {
        std::ofstream out(root / "labels.tsv");
        for (int i = 0; i < g.num_nodes; ++i)
            if (g.labels[i] >= 0) out << i << '\t' << g.labels[i] << '\n';
    } else if (!g.multilabels.empty()) {
        const int c = g.num_classes();
        std::ofstream out(root / "labels.tsv");
        for (int i = 0; i < g.num_nodes; ++i) {
            std::vector<int> bits(c, 0);
            for (int y : g.multilabels[i]) bits[y] = 1;
            out << i << '\t';
            for (int b = 0; b < c; ++b) {
                if (b) out << ',';
                out << bits[b];
            }
            out << '\n';
        }
    }
    if (g.split) {
        nlohmann::json j;
        j["train"] = g.split->train;
        j["val"] = g.split->val;
        j["test"] = g.split->test;
        std::ofstream out(root / "splits.json");
        out << j.dump(2) << '\n';
    }
}

SparseMatrix normalize_sym_weighted(const SparseMatrix& a) {
    const int n = a.rows();
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(a.nnz() + n);
    const auto& off = a.offsets();
    const auto& ci = a.col_indices();
    const auto& vals = a.values();
    for (int r = 0; r < n; ++r) {
        bool has_diag = false;
        for (auto k = off[r]; k < off[r + 1]; ++k) {
            double v = vals[k];
            if (ci[k] == r) {
                v += 1.0;  // self-loop
                has_diag = true;
            }
            t.emplace_back(r, ci[k], v);
        }
        if (!has_diag) t.emplace_back(r, r, 1.0);
    }
    SparseMatrix a_hat = SparseMatrix::from_triplets(n, n, std::move(t));
    Vector deg = a_hat.row_sums();
    std::vector<std::tuple<int, int, double>> out;
    out.reserve(a_hat.nnz());
    const auto& off2 = a_hat.offsets();
    const auto& ci2 = a_hat.col_indices();
    const auto& v2 = a_hat.values();
    for (int r = 0; r < n; ++r)
        for (auto k = off2[r]; k < off2[r + 1]; ++k)
            out.emplace_back(r, ci2[k], v2[k] / std::sqrt(deg[r] * deg[ci2[k]]));
    return SparseMatrix::from_triplets(n, n, std::move(out));
}

SparseMatrix normalize_sym(const Graph& g) {
    g.validate();
    return normalize_sym_weighted(g.adjacency);
}

SparseMatrix col_normalize(const SparseMatrix& a, IsolatedPolicy) {
    const int n = a.rows();
    Vector col = a.col_sums();
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(a.nnz() + n);
    const auto& off = a.offsets();
    const auto& ci = a.col_indices();
    const auto& vals = a.values();
    for (int r = 0; r < n; ++r)
        for (auto k = off[r]; k < off[r + 1]; ++k) t.emplace_back(r, ci[k], vals[k]);
    for (int c = 0; c < n; ++c)
        if (col[c] == 0.0) {
            t.emplace_back(c, c, 1.0);  // isolated node: unit self-loop column
            col[c] = 1.0;
        }
    for (auto& [r, c, v] : t) v /= col[c];
    return SparseMatrix::from_triplets(n, n, std::move(t));
}

SparseMatrix col_normalize(const Graph& g, IsolatedPolicy policy) {
    g.validate();
    return col_normalize(g.adjacency, policy);
}

SparseMatrix induced_adjacency(const SparseMatrix& a, const IndexSet& idx) {
    const int np = idx.size();
    std::vector<int> pos(a.cols(), -1);
    for (int k = 0; k < np; ++k) {
        if (idx[k] >= a.rows()) throw std::out_of_range("induced index out of range");
        pos[idx[k]] = k;
    }
    std::vector<std::tuple<int, int, double>> t;
    const auto& off = a.offsets();
    const auto& ci = a.col_indices();
    const auto& vals = a.values();
    for (int k = 0; k < np; ++k) {
        const int r = idx[k];
        for (auto e = off[r]; e < off[r + 1]; ++e)
            if (pos[ci[e]] >= 0) t.emplace_back(k, pos[ci[e]], vals[e]);
    }
    return SparseMatrix::from_triplets(np, np, std::move(t));
}

IndexSet bfs_within(const Graph& g, int center, int max_hops) {
    if (center < 0 || center >= g.num_nodes) throw std::out_of_range("invalid center id");
    if (max_hops < 0) throw std::invalid_argument("negative hop count");
    std::vector<int> dist(g.num_nodes, -1);
    std::vector<int> found{center};
    dist[center] = 0;
    std::queue<int> q;
    q.push(center);
    const auto& off = g.adjacency.offsets();
    const auto& ci = g.adjacency.col_indices();
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (dist[u] == max_hops) continue;
        for (auto k = off[u]; k < off[u + 1]; ++k) {
            int v = ci[k];
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                found.push_back(v);
                q.push(v);
            }
        }
    }
    return IndexSet(std::move(found));
}

Graph synth_sbm(int blocks, int per_block, double p_in, double p_out, int feat_dim,
                std::uint64_t seed) {
    if (p_in < 0 || p_in > 1 || p_out < 0 || p_out > 1)
        throw std::invalid_argument("probability outside [0,1]");
    const int n = blocks * per_block;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Graph g;
    g.num_nodes = n;
    g.labels.resize(n);
    for (int i = 0; i < n; ++i) g.labels[i] = i / per_block;

    std::vector<std::tuple<int, int, double>> t;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double p = (g.labels[i] == g.labels[j]) ? p_in : p_out;
            if (unif(rng) < p) {
                t.emplace_back(i, j, 1.0);
                t.emplace_back(j, i, 1.0);
            }
        }
    g.adjacency = SparseMatrix::from_triplets(n, n, std::move(t));

    g.features = Matrix::Zero(n, feat_dim);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < feat_dim; ++j) g.features(i, j) = 0.1 * unif(rng);
        g.features(i, g.labels[i] % feat_dim) += 1.0;  // block indicator
    }

    // deterministic 60/20/20 split, stratified by block
    Split s;
    for (int b = 0; b < blocks; ++b) {
        std::vector<int> members(per_block);
        for (int k = 0; k < per_block; ++k) members[k] = b * per_block + k;
        std::shuffle(members.begin(), members.end(), rng);
        const int n_train = std::max(1, per_block * 3 / 5);
        const int n_val = std::max(1, per_block / 5);
        for (int k = 0; k < per_block; ++k) {
            if (k < n_train)
                s.train.push_back(members[k]);
            else if (k < n_train + n_val)
                s.val.push_back(members[k]);
            else
                s.test.push_back(members[k]);
        }
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    g.split = std::move(s);
    g.validate();
    return g;
}

std::vector<int> shuffle_permutation(int n, std::uint64_t seed) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    if (n <= 1) return perm;
    std::mt19937_64 rng(seed);
    std::vector<int> identity = perm;
    do {
        std::shuffle(perm.begin(), perm.end(), rng);
    } while (perm == identity);
    return perm;
}

Matrix shuffle_rows(const Matrix& x, std::uint64_t seed) {
    auto perm = shuffle_permutation(static_cast<int>(x.rows()), seed);
    Matrix out(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) out.row(i) = x.row(perm[i]);
    return out;
}

bool graphs_equal(const Graph& a, const Graph& b) {
    if (a.num_nodes != b.num_nodes) return false;
    if (a.features.rows() != b.features.rows() || a.features.cols() != b.features.cols())
        return false;
    if (a.features != b.features) return false;
    if (!(a.adjacency == b.adjacency)) return false;
    if (a.labels != b.labels || a.multilabels != b.multilabels) return false;
    if (a.split.has_value() != b.split.has_value()) return false;
    if (a.split) {
        if (a.split->train != b.split->train || a.split->val != b.split->val ||
            a.split->test != b.split->test)
            return false;
    }
    return true;
}

}  // namespace mncscl
