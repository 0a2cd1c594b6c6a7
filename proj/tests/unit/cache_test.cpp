#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/cache.hpp"

using namespace mncscl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path = fs::temp_directory_path() / "mncscl_cache_unit";
    TempDir() { fs::remove_all(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("matrix, sparse and index-set payloads round trip") {
    TempDir dir;
    Matrix m = Matrix::Random(7, 5);
    cache_store_matrix(dir.str(), "m", m);
    auto m2 = cache_load_matrix(dir.str(), "m");
    REQUIRE(m2.has_value());
    CHECK((*m2 - m).cwiseAbs().maxCoeff() == 0.0);

    auto s = SparseMatrix::from_triplets(4, 6, {{0, 5, 1.5}, {3, 0, -2.0}, {1, 2, 0.25}});
    cache_store_sparse(dir.str(), "s", s);
    auto s2 = cache_load_sparse(dir.str(), "s");
    REQUIRE(s2.has_value());
    CHECK(*s2 == s);

    std::vector<IndexSet> sets = {IndexSet(std::vector<int>{1, 4}), IndexSet(),
                                  IndexSet(std::vector<int>{0, 2, 3})};
    cache_store_index_sets(dir.str(), "i", sets);
    auto sets2 = cache_load_index_sets(dir.str(), "i");
    REQUIRE(sets2.has_value());
    CHECK(*sets2 == sets);
}

TEST_CASE("missing keys and wrong payload kinds miss cleanly") {
    TempDir dir;
    CHECK(!cache_load_matrix(dir.str(), "absent").has_value());
    cache_store_matrix(dir.str(), "k", Matrix::Zero(2, 2));
    CHECK(!cache_load_sparse(dir.str(), "k").has_value());  // different extension
}

TEST_CASE("a stale version marker invalidates the entry") {
    TempDir dir;
    cache_store_matrix(dir.str(), "k", Matrix::Ones(2, 2));
    // corrupt the version header of the only file in the cache
    for (const auto& entry : fs::directory_iterator(dir.path)) {
        std::fstream f(entry.path(), std::ios::in | std::ios::out | std::ios::binary);
        std::uint32_t bogus = 0xffffffff;
        f.write(reinterpret_cast<const char*>(&bogus), sizeof bogus);
    }
    CHECK(!cache_load_matrix(dir.str(), "k").has_value());
}

TEST_CASE("dataset hash tracks structure and features") {
    Graph a = synth_sbm(2, 6, 0.5, 0.1, 4, 1);
    Graph b = a;
    CHECK(dataset_hash(a) == dataset_hash(b));
    b.features(0, 0) += 1.0;
    CHECK(dataset_hash(a) != dataset_hash(b));
    Graph c = synth_sbm(2, 6, 0.5, 0.1, 4, 2);
    CHECK(dataset_hash(a) != dataset_hash(c));
}
