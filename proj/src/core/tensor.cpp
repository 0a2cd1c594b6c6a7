#include "core/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace mncscl {

double Tensor::item() const {
    if (rows() != 1 || cols() != 1) throw std::invalid_argument("item() on non-scalar tensor");
    return (*value_)(0, 0);
}

bool Tape::any_on_tape(std::initializer_list<const Tensor*> ts) const {
    for (const Tensor* t : ts)
        if (t->on_tape()) {
            if (t->tape() != this) throw std::invalid_argument("tensor belongs to another tape");
            return true;
        }
    return false;
}

void Tape::accum(std::vector<Matrix>& grads, int id, const Matrix& contribution) {
    if (id < 0) return;
    if (grads[id].size() == 0)
        grads[id] = contribution;
    else
        grads[id] += contribution;
}

Tensor Tape::record(Matrix value, BackwardFn backward) {
    Node n;
    n.value = std::make_shared<Matrix>(std::move(value));
    n.backward = std::move(backward);
    nodes_.push_back(n);
    return Tensor(nodes_.back().value, this, static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::leaf(Matrix value, bool requires_grad) {
    if (!requires_grad) return Tensor(std::move(value));
    Node n;
    n.value = std::make_shared<Matrix>(std::move(value));
    n.is_leaf = true;
    nodes_.push_back(n);
    int id = static_cast<int>(nodes_.size()) - 1;
    leaf_ids_.push_back(id);
    return Tensor(nodes_.back().value, this, id);
}

GradTable Tape::backward(const Tensor& loss) {
    if (!loss.on_tape() || loss.tape() != this)
        throw std::invalid_argument("loss is not on this tape");
    if (loss.rows() != 1 || loss.cols() != 1) throw std::invalid_argument("loss is not scalar");

    std::vector<Matrix> grads(nodes_.size());
    grads[loss.node_id()] = Matrix::Ones(1, 1);
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        if (grads[i].size() == 0 || !nodes_[i].backward) continue;
        nodes_[i].backward(grads[i], grads);
    }
    GradTable table;
    for (int id : leaf_ids_) {
        if (grads[id].size() == 0)
            table[id] = Matrix::Zero(nodes_[id].value->rows(), nodes_[id].value->cols());
        else
            table[id] = std::move(grads[id]);
    }
    return table;
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape mismatch");
    Matrix out = a.value() * b.value();
    if (!any_on_tape({&a, &b})) return Tensor(std::move(out));
    auto av = a.value(), bv = b.value();
    int ia = a.node_id(), ib = b.node_id();
    return record(std::move(out), [av, bv, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) accum(grads, ia, g * bv.transpose());
        if (ib >= 0) accum(grads, ib, av.transpose() * g);
    });
}

Tensor Tape::spmm(const SparseMatrix& s, const Tensor& b) {
    Matrix out = s.multiply(b.value());
    if (!any_on_tape({&b})) return Tensor(std::move(out));
    auto st = std::make_shared<SparseMatrix>(s.transposed());
    int ib = b.node_id();
    return record(std::move(out), [st, ib](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ib, st->multiply(g));
    });
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    Matrix out;
    if (b.rows() == a.rows() && b.cols() == a.cols())
        out = a.value() + b.value();
    else if (b.rows() == 1 && b.cols() == a.cols())
        out = a.value().rowwise() + b.value().row(0);
    else if (b.rows() == 1 && b.cols() == 1)
        out = a.value().array() + b.value()(0, 0);
    else
        throw std::invalid_argument("add shape mismatch");
    if (!any_on_tape({&a, &b})) return Tensor(std::move(out));
    int ia = a.node_id(), ib = b.node_id();
    int br = b.rows(), bc = b.cols();
    return record(std::move(out), [ia, ib, br, bc](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) accum(grads, ia, g);
        if (ib >= 0) {
            if (br == g.rows() && bc == g.cols())
                accum(grads, ib, g);
            else if (br == 1 && bc == g.cols())
                accum(grads, ib, g.colwise().sum());
            else
                accum(grads, ib, Matrix::Constant(1, 1, g.sum()));
        }
    });
}

Tensor Tape::scale(const Tensor& a, double c) {
    Matrix out = c * a.value();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    return record(std::move(out), [ia, c](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, c * g);
    });
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("mul shape mismatch");
    Matrix out = a.value().cwiseProduct(b.value());
    if (!any_on_tape({&a, &b})) return Tensor(std::move(out));
    auto av = a.value(), bv = b.value();
    int ia = a.node_id(), ib = b.node_id();
    return record(std::move(out), [av, bv, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) accum(grads, ia, g.cwiseProduct(bv));
        if (ib >= 0) accum(grads, ib, g.cwiseProduct(av));
    });
}

Tensor Tape::prelu(const Tensor& a, const Tensor& slope) {
    if (slope.rows() != 1 || slope.cols() != 1)
        throw std::invalid_argument("prelu slope must be scalar");
    const double s = slope.value()(0, 0);
    Matrix out = a.value().unaryExpr([s](double x) { return x > 0 ? x : s * x; });
    if (!any_on_tape({&a, &slope})) return Tensor(std::move(out));
    auto av = a.value();
    int ia = a.node_id(), is = slope.node_id();
    return record(std::move(out), [av, s, ia, is](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) {
            Matrix da = g;
            for (int i = 0; i < da.rows(); ++i)
                for (int j = 0; j < da.cols(); ++j)
                    if (av(i, j) <= 0) da(i, j) *= s;  // slope-side derivative at the kink
            accum(grads, ia, da);
        }
        if (is >= 0) {
            double ds = 0;
            for (int i = 0; i < g.rows(); ++i)
                for (int j = 0; j < g.cols(); ++j)
                    if (av(i, j) <= 0) ds += g(i, j) * av(i, j);
            accum(grads, is, Matrix::Constant(1, 1, ds));
        }
    });
}

Tensor Tape::sigmoid(const Tensor& a) {
    Matrix out = a.value().unaryExpr([](double x) {
        return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    auto y = out;
    int ia = a.node_id();
    return record(std::move(out), [y, ia](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, g.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix())));
    });
}

Tensor Tape::row_softmax(const Tensor& a) {
    Matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) {
        Eigen::RowVectorXd row = a.value().row(i);
        double m = row.maxCoeff();
        Eigen::RowVectorXd e = (row.array() - m).exp();
        out.row(i) = e / e.sum();
    }
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    auto y = out;
    int ia = a.node_id();
    return record(std::move(out), [y, ia](const Matrix& g, std::vector<Matrix>& grads) {
        Matrix da(g.rows(), g.cols());
        for (int i = 0; i < g.rows(); ++i) {
            double dot = g.row(i).dot(y.row(i));
            da.row(i) = (g.row(i).array() - dot) * y.row(i).array();
        }
        accum(grads, ia, da);
    });
}

Tensor Tape::mean_rows(const Tensor& a, const IndexSet& idx) {
    if (idx.empty()) throw std::invalid_argument("mean_rows over empty index set");
    if (idx.ids().back() >= a.rows()) throw std::out_of_range("mean_rows index out of range");
    Matrix out = Matrix::Zero(1, a.cols());
    for (int i : idx.ids()) out += a.value().row(i);
    out /= idx.size();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    auto ids = idx.ids();
    int rows = a.rows();
    return record(std::move(out), [ids, ia, rows](const Matrix& g, std::vector<Matrix>& grads) {
        Matrix da = Matrix::Zero(rows, g.cols());
        for (int i : ids) da.row(i) = g.row(0) / static_cast<double>(ids.size());
        accum(grads, ia, da);
    });
}

Tensor Tape::bilinear(const Tensor& a, const Tensor& w, const Tensor& b) {
    if (a.rows() != 1 || b.rows() != 1 || a.cols() != w.rows() || w.cols() != b.cols())
        throw std::invalid_argument("bilinear shape mismatch");
    Matrix out = a.value() * w.value() * b.value().transpose();
    if (!any_on_tape({&a, &w, &b})) return Tensor(std::move(out));
    auto av = a.value(), wv = w.value(), bv = b.value();
    int ia = a.node_id(), iw = w.node_id(), ib = b.node_id();
    return record(std::move(out),
                  [av, wv, bv, ia, iw, ib](const Matrix& g, std::vector<Matrix>& grads) {
                      const double gs = g(0, 0);
                      if (ia >= 0) accum(grads, ia, gs * (bv * wv.transpose()));
                      if (iw >= 0) accum(grads, iw, gs * (av.transpose() * bv));
                      if (ib >= 0) accum(grads, ib, gs * (av * wv));
                  });
}

Tensor Tape::log(const Tensor& a) {
    if ((a.value().array() <= 0.0).any()) throw std::domain_error("log of non-positive value");
    Matrix out = a.value().array().log();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    auto av = a.value();
    int ia = a.node_id();
    return record(std::move(out), [av, ia](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, (g.array() / av.array()).matrix());
    });
}

Tensor Tape::neg_log_one_minus(const Tensor& a) {
    if ((a.value().array() >= 1.0).any())
        throw std::domain_error("neg_log_one_minus of value >= 1");
    Matrix out = -(1.0 - a.value().array()).log();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    auto av = a.value();
    int ia = a.node_id();
    return record(std::move(out), [av, ia](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, (g.array() / (1.0 - av.array())).matrix());
    });
}

Tensor Tape::clamp(const Tensor& a, double lo, double hi) {
    Matrix out = a.value().array().min(hi).max(lo);
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    auto av = a.value();
    int ia = a.node_id();
    return record(std::move(out), [av, lo, hi, ia](const Matrix& g, std::vector<Matrix>& grads) {
        Matrix da = g;
        for (int i = 0; i < da.rows(); ++i)
            for (int j = 0; j < da.cols(); ++j)
                if (av(i, j) <= lo || av(i, j) >= hi) da(i, j) = 0.0;
        accum(grads, ia, da);
    });
}

Tensor Tape::sum(const Tensor& a) {
    Matrix out = Matrix::Constant(1, 1, a.value().sum());
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    int r = a.rows(), c = a.cols();
    return record(std::move(out), [ia, r, c](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, Matrix::Constant(r, c, g(0, 0)));
    });
}

Tensor Tape::row_sums(const Tensor& a) {
    Matrix out = a.value().rowwise().sum();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    int c = a.cols();
    return record(std::move(out), [ia, c](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, g.replicate(1, c));
    });
}

Tensor Tape::transpose(const Tensor& a) {
    Matrix out = a.value().transpose();
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    return record(std::move(out), [ia](const Matrix& g, std::vector<Matrix>& grads) {
        accum(grads, ia, g.transpose());
    });
}

Tensor Tape::div_rows(const Tensor& a, const Tensor& s) {
    if (s.cols() != 1 || s.rows() != a.rows()) throw std::invalid_argument("div_rows shape mismatch");
    Matrix out = a.value().array().colwise() / s.value().col(0).array();
    if (!any_on_tape({&a, &s})) return Tensor(std::move(out));
    auto av = a.value(), sv = s.value();
    int ia = a.node_id(), is = s.node_id();
    return record(std::move(out), [av, sv, ia, is](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) accum(grads, ia, (g.array().colwise() / sv.col(0).array()).matrix());
        if (is >= 0) {
            Matrix ds(sv.rows(), 1);
            for (int i = 0; i < sv.rows(); ++i)
                ds(i, 0) = -g.row(i).dot(av.row(i)) / (sv(i, 0) * sv(i, 0));
            accum(grads, is, ds);
        }
    });
}

Tensor Tape::pairwise_sqdist(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_sqdist shape mismatch");
    const Matrix& av = a.value();
    const Matrix& bv = b.value();
    Vector an = av.rowwise().squaredNorm();
    Vector bn = bv.rowwise().squaredNorm();
    Matrix out = (-2.0 * av * bv.transpose());
    out.colwise() += an;
    out.rowwise() += bn.transpose();
    out = out.cwiseMax(0.0);
    if (!any_on_tape({&a, &b})) return Tensor(std::move(out));
    int ia = a.node_id(), ib = b.node_id();
    auto ac = av, bc = bv;
    return record(std::move(out), [ac, bc, ia, ib](const Matrix& g, std::vector<Matrix>& grads) {
        if (ia >= 0) {
            Matrix da = 2.0 * ((ac.array().colwise() * g.rowwise().sum().array()).matrix() - g * bc);
            accum(grads, ia, da);
        }
        if (ib >= 0) {
            Matrix db =
                2.0 * ((bc.array().colwise() * g.colwise().sum().transpose().array()).matrix() -
                       g.transpose() * ac);
            accum(grads, ib, db);
        }
    });
}

Tensor Tape::permute_rows(const Tensor& a, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != a.rows())
        throw std::invalid_argument("permute_rows length mismatch");
    Matrix out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i) out.row(i) = a.value().row(perm[i]);
    if (!any_on_tape({&a})) return Tensor(std::move(out));
    int ia = a.node_id();
    auto p = perm;
    return record(std::move(out), [p, ia](const Matrix& g, std::vector<Matrix>& grads) {
        Matrix da = Matrix::Zero(g.rows(), g.cols());
        for (int i = 0; i < g.rows(); ++i) da.row(p[i]) += g.row(i);
        accum(grads, ia, da);
    });
}

}  // namespace mncscl
