#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mncscl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Compressed-row sparse matrix. Column indices are sorted and unique
/// within each row; dimensions are explicit and may include empty rows.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

    // Build from (row, col, value) triplets. Duplicates are summed.
    static SparseMatrix from_triplets(int rows, int cols,
                                      std::vector<std::tuple<int, int, double>> triplets);

    static SparseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }

    const std::vector<std::int64_t>& offsets() const { return offsets_; }
    const std::vector<int>& col_indices() const { return cols_idx_; }
    const std::vector<double>& values() const { return values_; }

    double coeff(int r, int c) const;

    Matrix to_dense() const;
    SparseMatrix transposed() const;

    // y = S * B  (dense right operand)
    Matrix multiply(const Matrix& B) const;

    Vector row_sums() const;
    Vector col_sums() const;

    bool operator==(const SparseMatrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::int64_t> offsets_{0};
    std::vector<int> cols_idx_;
    std::vector<double> values_;
};

}  // namespace mncscl
