#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "core/graph.hpp"
#include "core/sparse.hpp"

namespace mncscl {

class Tape;

/// Handle to a dense value, optionally linked to a differentiation tape.
/// A constant Tensor (no tape) is immutable and freely shareable.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Matrix value)
        : value_(std::make_shared<Matrix>(std::move(value))) {}
    Tensor(std::shared_ptr<Matrix> value, Tape* tape, int node_id)
        : value_(std::move(value)), tape_(tape), node_id_(node_id) {}

    static Tensor scalar(double v) { return Tensor(Matrix::Constant(1, 1, v)); }

    const Matrix& value() const { return *value_; }
    int rows() const { return static_cast<int>(value_->rows()); }
    int cols() const { return static_cast<int>(value_->cols()); }
    double item() const;

    Tape* tape() const { return tape_; }
    int node_id() const { return node_id_; }
    bool on_tape() const { return tape_ != nullptr; }

    Tensor detached() const { return Tensor(*value_); }

private:
    std::shared_ptr<Matrix> value_;
    Tape* tape_ = nullptr;
    int node_id_ = -1;
};

using GradTable = std::unordered_map<int, Matrix>;

/// Reverse-mode tape. One tape per training step; nodes are recorded in
/// topological order and replayed in reverse by backward().
class Tape {
public:
    Tensor leaf(Matrix value, bool requires_grad = true);

    /// Gradients of a scalar loss w.r.t. every recorded leaf.
    /// Leaves unreachable from the loss get zero gradients.
    GradTable backward(const Tensor& loss);

    const std::vector<int>& leaf_ids() const { return leaf_ids_; }
    std::size_t size() const { return nodes_.size(); }

    // --- primitive catalogue -------------------------------------------
    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor spmm(const SparseMatrix& s, const Tensor& b);
    Tensor add(const Tensor& a, const Tensor& b);  // b may be 1xC or 1x1 (broadcast)
    Tensor scale(const Tensor& a, double c);
    Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
    Tensor prelu(const Tensor& a, const Tensor& slope);  // slope: 1x1
    Tensor sigmoid(const Tensor& a);
    Tensor row_softmax(const Tensor& a);
    Tensor mean_rows(const Tensor& a, const IndexSet& idx);
    Tensor bilinear(const Tensor& a, const Tensor& w, const Tensor& b);  // row vecs -> 1x1
    Tensor log(const Tensor& a);
    Tensor neg_log_one_minus(const Tensor& a);
    Tensor clamp(const Tensor& a, double lo, double hi);
    Tensor sum(const Tensor& a);            // -> 1x1
    Tensor row_sums(const Tensor& a);       // -> Nx1
    Tensor transpose(const Tensor& a);
    Tensor div_rows(const Tensor& a, const Tensor& s);  // s: Nx1, row i of a divided by s(i)
    Tensor pairwise_sqdist(const Tensor& a, const Tensor& b);  // NxF, MxF -> NxM
    Tensor permute_rows(const Tensor& a, const std::vector<int>& perm);

private:
    // backward(g, grads): accumulate d(loss)/d(parent) into grads[parent]
    // given g = d(loss)/d(this node). Constant inputs have parent id -1.
    using BackwardFn = std::function<void(const Matrix& g, std::vector<Matrix>& grads)>;

    struct Node {
        std::shared_ptr<Matrix> value;
        BackwardFn backward;
        bool is_leaf = false;
    };

    Tensor record(Matrix value, BackwardFn backward);
    bool any_on_tape(std::initializer_list<const Tensor*> ts) const;

    static void accum(std::vector<Matrix>& grads, int id, const Matrix& contribution);

    std::vector<Node> nodes_;
    std::vector<int> leaf_ids_;
};

}  // namespace mncscl
