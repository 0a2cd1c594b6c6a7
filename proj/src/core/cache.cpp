#include "core/cache.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace mncscl {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t dataset_hash(const Graph& g) {
    std::uint64_t h = fnv1a(&g.num_nodes, sizeof g.num_nodes);
    const auto& ci = g.adjacency.col_indices();
    const auto& off = g.adjacency.offsets();
    if (!ci.empty()) h = fnv1a(ci.data(), ci.size() * sizeof(int), h);
    if (!off.empty()) h = fnv1a(off.data(), off.size() * sizeof(std::int64_t), h);
    if (g.features.size() > 0)
        h = fnv1a(g.features.data(), static_cast<std::size_t>(g.features.size()) * sizeof(double),
                  h);
    return h;
}

namespace {

constexpr std::uint32_t kCacheVersion = 1;

fs::path key_path(const std::string& dir, const std::string& key, const char* ext) {
    std::ostringstream name;
    name << std::hex << fnv1a(key) << ext;
    return fs::path(dir) / name.str();
}

bool open_for_read(std::ifstream& in, const fs::path& p) {
    in.open(p, std::ios::binary);
    if (!in) return false;
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    return in && version == kCacheVersion;
}

void open_for_write(std::ofstream& out, const std::string& dir, const fs::path& p) {
    fs::create_directories(dir);
    out.open(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
}

}  // namespace

void cache_store_matrix(const std::string& dir, const std::string& key, const Matrix& m) {
    std::ofstream out;
    open_for_write(out, dir, key_path(dir, key, ".mat"));
    std::int64_t r = m.rows(), c = m.cols();
    out.write(reinterpret_cast<const char*>(&r), sizeof r);
    out.write(reinterpret_cast<const char*>(&c), sizeof c);
    out.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * r * c);
}

std::optional<Matrix> cache_load_matrix(const std::string& dir, const std::string& key) {
    std::ifstream in;
    if (!open_for_read(in, key_path(dir, key, ".mat"))) return std::nullopt;
    std::int64_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof r);
    in.read(reinterpret_cast<char*>(&c), sizeof c);
    Matrix m(r, c);
    in.read(reinterpret_cast<char*>(m.data()), sizeof(double) * r * c);
    if (!in) return std::nullopt;
    return m;
}

void cache_store_sparse(const std::string& dir, const std::string& key, const SparseMatrix& m) {
    std::ofstream out;
    open_for_write(out, dir, key_path(dir, key, ".csr"));
    std::int64_t r = m.rows(), c = m.cols(), nnz = m.nnz();
    out.write(reinterpret_cast<const char*>(&r), sizeof r);
    out.write(reinterpret_cast<const char*>(&c), sizeof c);
    out.write(reinterpret_cast<const char*>(&nnz), sizeof nnz);
    out.write(reinterpret_cast<const char*>(m.offsets().data()),
              sizeof(std::int64_t) * (r + 1));
    out.write(reinterpret_cast<const char*>(m.col_indices().data()), sizeof(int) * nnz);
    out.write(reinterpret_cast<const char*>(m.values().data()), sizeof(double) * nnz);
}

std::optional<SparseMatrix> cache_load_sparse(const std::string& dir, const std::string& key) {
    std::ifstream in;
    if (!open_for_read(in, key_path(dir, key, ".csr"))) return std::nullopt;
    std::int64_t r = 0, c = 0, nnz = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof r);
    in.read(reinterpret_cast<char*>(&c), sizeof c);
    in.read(reinterpret_cast<char*>(&nnz), sizeof nnz);
    std::vector<std::int64_t> offsets(r + 1);
    std::vector<int> cols(nnz);
    std::vector<double> vals(nnz);
    in.read(reinterpret_cast<char*>(offsets.data()), sizeof(std::int64_t) * (r + 1));
    in.read(reinterpret_cast<char*>(cols.data()), sizeof(int) * nnz);
    in.read(reinterpret_cast<char*>(vals.data()), sizeof(double) * nnz);
    if (!in) return std::nullopt;
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(nnz);
    for (std::int64_t row = 0; row < r; ++row)
        for (auto k = offsets[row]; k < offsets[row + 1]; ++k)
            t.emplace_back(static_cast<int>(row), cols[k], vals[k]);
    return SparseMatrix::from_triplets(static_cast<int>(r), static_cast<int>(c), std::move(t));
}

void cache_store_index_sets(const std::string& dir, const std::string& key,
                            const std::vector<IndexSet>& sets) {
    std::ofstream out;
    open_for_write(out, dir, key_path(dir, key, ".idx"));
    std::int64_t n = static_cast<std::int64_t>(sets.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const auto& s : sets) {
        std::int64_t len = s.size();
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(reinterpret_cast<const char*>(s.ids().data()), sizeof(int) * len);
    }
}

std::optional<std::vector<IndexSet>> cache_load_index_sets(const std::string& dir,
                                                           const std::string& key) {
    std::ifstream in;
    if (!open_for_read(in, key_path(dir, key, ".idx"))) return std::nullopt;
    std::int64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    std::vector<IndexSet> sets;
    sets.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        std::vector<int> ids(len);
        in.read(reinterpret_cast<char*>(ids.data()), sizeof(int) * len);
        if (!in) return std::nullopt;
        sets.push_back(IndexSet(std::move(ids)));
    }
    return sets;
}

}  // namespace mncscl
