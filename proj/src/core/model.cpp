#include "core/model.hpp"

#include <random>
#include <stdexcept>

#include "core/init.hpp"

namespace mncscl {

EncoderKind encoder_kind_from_string(const std::string& s) {
    if (s == "gcn") return EncoderKind::Gcn;
    if (s == "gcn_skip") return EncoderKind::GcnSkip;
    throw std::invalid_argument("unknown encoder kind: '" + s + "'");
}

std::string to_string(EncoderKind k) {
    return k == EncoderKind::Gcn ? "gcn" : "gcn_skip";
}

ModelParams ModelParams::init(int in_dim, int out_dim, EncoderKind encoder,
                              CommunalStrategy strategy, int clusters, int est_hidden,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ModelParams p;
    p.encoder = encoder;
    p.strategy = strategy;
    p.w = glorot_uniform(in_dim, out_dim, rng);
    if (encoder == EncoderKind::GcnSkip) p.w_skip = glorot_uniform(in_dim, out_dim, rng);
    p.slope = Matrix::Constant(1, 1, 0.25);
    p.w_d = glorot_uniform(out_dim, out_dim, rng);
    if (strategy == CommunalStrategy::S3) {
        p.est = EstimationParams::init(out_dim, est_hidden, clusters, rng());
        p.has_est = true;
    }
    return p;
}

ModelLeaves register_leaves(Tape& tape, const ModelParams& params) {
    ModelLeaves l;
    l.w = tape.leaf(params.w);
    if (params.w_skip.size() > 0) {
        l.w_skip = tape.leaf(params.w_skip);
        l.has_skip = true;
    }
    l.slope = tape.leaf(params.slope);
    l.w_d = tape.leaf(params.w_d);
    if (params.has_est) {
        l.est.w1 = tape.leaf(params.est.w1);
        l.est.b1 = tape.leaf(params.est.b1);
        l.est.slope = tape.leaf(params.est.slope);
        l.est.w2 = tape.leaf(params.est.w2);
        l.est.b2 = tape.leaf(params.est.b2);
        l.has_est = true;
    }
    return l;
}

Tensor encode(Tape& tape, const Tensor& x, const SparseMatrix& p, const ModelLeaves& leaves) {
    return tape.prelu(tape.matmul(tape.spmm(p, x), leaves.w), leaves.slope);
}

Tensor encode_skip(Tape& tape, const Tensor& x, const SparseMatrix& p,
                   const SparseMatrix& a_hat, const ModelLeaves& leaves) {
    if (!leaves.has_skip) throw std::invalid_argument("skip encoder without W_skip");
    Tensor main = tape.matmul(tape.spmm(p, x), leaves.w);
    Tensor skip = tape.matmul(tape.spmm(a_hat, x), leaves.w_skip);
    return tape.prelu(tape.add(main, skip), leaves.slope);
}

Tensor encode_premultiplied(Tape& tape, const Matrix& px, const ModelLeaves& leaves) {
    return tape.prelu(tape.matmul(Tensor(px), leaves.w), leaves.slope);
}

Tensor encode_skip_premultiplied(Tape& tape, const Matrix& px, const Matrix& ax,
                                 const ModelLeaves& leaves) {
    if (!leaves.has_skip) throw std::invalid_argument("skip encoder without W_skip");
    Tensor main = tape.matmul(Tensor(px), leaves.w);
    Tensor skip = tape.matmul(Tensor(ax), leaves.w_skip);
    return tape.prelu(tape.add(main, skip), leaves.slope);
}

Tensor readout(Tape& tape, const Tensor& h_sub) {
    if (h_sub.rows() == 0) throw std::invalid_argument("readout of empty subgraph");
    return tape.sigmoid(tape.mean_rows(h_sub, IndexSet::full(h_sub.rows())));
}

Tensor discriminate(Tape& tape, const Tensor& a, const Tensor& b, const Tensor& w_d) {
    return tape.sigmoid(tape.bilinear(a, w_d, b));
}

Tensor subgraph_repr(Tape& tape, SubgraphKind kind, int node, const Tensor& h,
                     const SubgraphFamily& family, const Tensor* gamma, const Tensor* centers) {
    switch (kind) {
        case SubgraphKind::Basic:
            return tape.mean_rows(h, IndexSet::single(node));
        case SubgraphKind::Neighboring:
            return tape.sigmoid(tape.mean_rows(h, family.neighboring.at(node)));
        case SubgraphKind::Intimate:
            return tape.sigmoid(tape.mean_rows(h, family.intimate.at(node)));
        case SubgraphKind::Communal: {
            if (family.hyper.strategy == CommunalStrategy::S1) {
                std::vector<int> members;
                for (int j = 0; j < family.num_nodes; ++j)
                    if (family.communal_partition[j] == family.communal_partition[node])
                        members.push_back(j);
                return tape.sigmoid(tape.mean_rows(h, IndexSet(std::move(members))));
            }
            if (!gamma || !centers)
                throw std::invalid_argument("communal repr requires cluster tensors");
            Tensor row = tape.mean_rows(*gamma, IndexSet::single(node));
            return tape.sigmoid(tape.matmul(row, *centers));
        }
        case SubgraphKind::Full: {
            const double eta = family.hyper.eta;
            Tensor global = tape.sigmoid(tape.mean_rows(h, IndexSet::full(h.rows())));
            Tensor self = tape.mean_rows(h, IndexSet::single(node));
            return tape.add(tape.scale(self, eta), tape.scale(global, 1.0 - eta));
        }
    }
    throw std::invalid_argument("unknown subgraph kind");
}

Tensor batched_repr(Tape& tape, SubgraphKind kind, const Tensor& h, const SubgraphFamily& family,
                    const Tensor* gamma, const Tensor* centers) {
    switch (kind) {
        case SubgraphKind::Basic:
            return h;
        case SubgraphKind::Neighboring:
            return tape.sigmoid(tape.spmm(family.mean_neighboring, h));
        case SubgraphKind::Intimate:
            return tape.sigmoid(tape.spmm(family.mean_intimate, h));
        case SubgraphKind::Communal: {
            if (family.hyper.strategy == CommunalStrategy::S1)
                return tape.sigmoid(tape.spmm(family.mean_communal, h));
            if (!gamma || !centers)
                throw std::invalid_argument("communal repr requires cluster tensors");
            return tape.sigmoid(tape.matmul(*gamma, *centers));
        }
        case SubgraphKind::Full: {
            const double eta = family.hyper.eta;
            Tensor global = tape.sigmoid(tape.mean_rows(h, IndexSet::full(h.rows())));
            return tape.add(tape.scale(h, eta), tape.scale(global, 1.0 - eta));
        }
    }
    throw std::invalid_argument("unknown subgraph kind");
}

}  // namespace mncscl
