#include "core/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace mncscl {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         std::vector<std::tuple<int, int, double>> triplets) {
    for (const auto& [r, c, v] : triplets) {
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw std::out_of_range("sparse triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseMatrix m(rows, cols);
    m.cols_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    int last_r = -1, last_c = -1;
    std::vector<std::int64_t> row_count(rows, 0);
    for (const auto& [r, c, v] : triplets) {
        if (r == last_r && c == last_c) {
            m.values_.back() += v;  // merge duplicate coordinate
            continue;
        }
        m.cols_idx_.push_back(c);
        m.values_.push_back(v);
        ++row_count[r];
        last_r = r;
        last_c = c;
    }
    for (int r = 0; r < rows; ++r) m.offsets_[r + 1] = m.offsets_[r] + row_count[r];
    return m;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(n);
    for (int i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    return from_triplets(n, n, std::move(t));
}

double SparseMatrix::coeff(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("sparse coeff index out of range");
    auto begin = cols_idx_.begin() + offsets_[r];
    auto end = cols_idx_.begin() + offsets_[r + 1];
    auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return values_[std::distance(cols_idx_.begin(), it)];
}

Matrix SparseMatrix::to_dense() const {
    Matrix d = Matrix::Zero(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
        for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, cols_idx_[k]) = values_[k];
    return d;
}

SparseMatrix SparseMatrix::transposed() const {
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k)
            t.emplace_back(cols_idx_[k], r, values_[k]);
    return from_triplets(cols_, rows_, std::move(t));
}

Matrix SparseMatrix::multiply(const Matrix& B) const {
    if (B.rows() != cols_) throw std::invalid_argument("spmm dimension mismatch");
    Matrix out = Matrix::Zero(rows_, B.cols());
    for (int r = 0; r < rows_; ++r)
        for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k)
            out.row(r) += values_[k] * B.row(cols_idx_[k]);
    return out;
}

Vector SparseMatrix::row_sums() const {
    Vector s = Vector::Zero(rows_);
    for (int r = 0; r < rows_; ++r)
        for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) s[r] += values_[k];
    return s;
}

Vector SparseMatrix::col_sums() const {
    Vector s = Vector::Zero(cols_);
    for (int r = 0; r < rows_; ++r)
        for (auto k = offsets_[r]; k < offsets_[r + 1]; ++k) s[cols_idx_[k]] += values_[k];
    return s;
}

}  // namespace mncscl
