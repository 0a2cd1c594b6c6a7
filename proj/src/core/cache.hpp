#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/graph.hpp"

namespace mncscl {

/// Content hash of a graph (structure + features), used to key caches.
std::uint64_t dataset_hash(const Graph& g);

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(const std::string& s);

// Binary, versioned cache files under `dir`, keyed by an arbitrary string.
void cache_store_matrix(const std::string& dir, const std::string& key, const Matrix& m);
std::optional<Matrix> cache_load_matrix(const std::string& dir, const std::string& key);

void cache_store_sparse(const std::string& dir, const std::string& key, const SparseMatrix& m);
std::optional<SparseMatrix> cache_load_sparse(const std::string& dir, const std::string& key);

void cache_store_index_sets(const std::string& dir, const std::string& key,
                            const std::vector<IndexSet>& sets);
std::optional<std::vector<IndexSet>> cache_load_index_sets(const std::string& dir,
                                                           const std::string& key);

}  // namespace mncscl
