#pragma once

#include <cmath>
#include <random>

#include "core/sparse.hpp"

namespace mncscl {

inline Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace mncscl
