#include "core/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "core/adam.hpp"
#include "core/cache.hpp"

namespace mncscl {

void TrainConfig::validate() const {
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (lr <= 0) throw std::invalid_argument("learning rate must be positive");
    if (max_epochs < 0) throw std::invalid_argument("negative epoch count");
    if (kinds.size() < 2 && max_epochs > 0)
        throw std::invalid_argument("at least two subgraph kinds required");
    if (loss == LossMode::CoreView && max_epochs > 0) {
        bool has_basic = false;
        for (auto k : kinds) has_basic |= (k == SubgraphKind::Basic);
        if (!has_basic) throw std::invalid_argument("core-view loss requires the basic subgraph");
    }
}

namespace {

SparseMatrix adjacency_with_loops(const Graph& g) {
    std::vector<std::tuple<int, int, double>> t;
    const auto& off = g.adjacency.offsets();
    const auto& ci = g.adjacency.col_indices();
    const auto& vals = g.adjacency.values();
    for (int r = 0; r < g.num_nodes; ++r) {
        bool diag = false;
        for (auto k = off[r]; k < off[r + 1]; ++k) {
            t.emplace_back(r, ci[k], vals[k]);
            diag |= (ci[k] == r);
        }
        if (!diag) t.emplace_back(r, r, 1.0);
    }
    return SparseMatrix::from_triplets(g.num_nodes, g.num_nodes, std::move(t));
}

struct ParamBinding {
    std::vector<Matrix*> params;
    std::vector<int> leaf_ids;
};

ParamBinding bind_params(ModelParams& p, const ModelLeaves& l) {
    ParamBinding b;
    b.params = {&p.w, &p.slope, &p.w_d};
    b.leaf_ids = {l.w.node_id(), l.slope.node_id(), l.w_d.node_id()};
    if (l.has_skip) {
        b.params.push_back(&p.w_skip);
        b.leaf_ids.push_back(l.w_skip.node_id());
    }
    if (l.has_est) {
        b.params.insert(b.params.end(),
                        {&p.est.w1, &p.est.b1, &p.est.slope, &p.est.w2, &p.est.b2});
        b.leaf_ids.insert(b.leaf_ids.end(),
                          {l.est.w1.node_id(), l.est.b1.node_id(), l.est.slope.node_id(),
                           l.est.w2.node_id(), l.est.b2.node_id()});
    }
    return b;
}

}  // namespace

Matrix embed(const Graph& g, const ModelParams& params) {
    SparseMatrix p = normalize_sym(g);
    Matrix pre = p.multiply(g.features) * params.w;
    if (params.encoder == EncoderKind::GcnSkip) {
        if (params.w_skip.size() == 0) throw std::invalid_argument("skip encoder without W_skip");
        pre += adjacency_with_loops(g).multiply(g.features) * params.w_skip;
    }
    const double s = params.slope(0, 0);
    return pre.unaryExpr([s](double x) { return x > 0 ? x : s * x; });
}

TrainReport train(const Graph& g, const TrainConfig& cfg) {
    cfg.validate();
    g.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const int n = g.num_nodes;

    // ---- precomputation (fixed across epochs) --------------------------
    SparseMatrix p_clean = normalize_sym(g);
    Matrix px_clean = p_clean.multiply(g.features);
    Matrix ax_clean;
    SparseMatrix a_hat;
    if (cfg.encoder == EncoderKind::GcnSkip) {
        a_hat = adjacency_with_loops(g);
        ax_clean = a_hat.multiply(g.features);
    }

    SparseMatrix abar = col_normalize(g);
    const std::uint64_t dhash = cfg.cache_dir.empty() ? 0 : dataset_hash(g);
    DiffusionMatrix ppr;
    const DiffusionMatrix* ppr_ptr = nullptr;
    for (auto k : cfg.kinds)
        if (k == SubgraphKind::Intimate && !ppr_ptr) {
            const std::string key =
                "ppr:" + std::to_string(dhash) + ":" + std::to_string(cfg.ppr_alpha);
            bool cached = false;
            if (!cfg.cache_dir.empty()) {
                if (auto m = cache_load_matrix(cfg.cache_dir, key)) {
                    ppr.values = std::move(*m);
                    ppr.kind = DiffusionKind::Ppr;
                    ppr.param = cfg.ppr_alpha;
                    cached = true;
                }
            }
            if (!cached) {
                ppr = ppr_matrix(abar, cfg.ppr_alpha);
                if (!cfg.cache_dir.empty()) cache_store_matrix(cfg.cache_dir, key, ppr.values);
            }
            ppr_ptr = &ppr;
        }
    SubgraphFamily family = build_family(g, cfg.kinds, cfg.hyper, ppr_ptr, cfg.seeds.init);

    const bool diffusion_mode = cfg.corruption == CorruptionMode::Diffusion ||
                                cfg.corruption == CorruptionMode::DiffusionPlusShuffle;
    const bool shuffle_mode = cfg.corruption == CorruptionMode::Shuffle ||
                              cfg.corruption == CorruptionMode::DiffusionPlusShuffle;
    SparseMatrix u_sparse;
    SparseMatrix p_corrupt;
    if (diffusion_mode) {
        const std::string key = "heat:" + std::to_string(dhash) + ":" +
                                std::to_string(cfg.heat_t) + ":" + std::to_string(cfg.heat_order) +
                                ":" + std::to_string(cfg.diffusion_topk);
        bool cached = false;
        if (!cfg.cache_dir.empty()) {
            if (auto m = cache_load_sparse(cfg.cache_dir, key)) {
                u_sparse = std::move(*m);
                cached = true;
            }
        }
        if (!cached) {
            u_sparse =
                sparsify_topk(heat_matrix(abar, cfg.heat_t, cfg.heat_order), cfg.diffusion_topk);
            if (!cfg.cache_dir.empty()) cache_store_sparse(cfg.cache_dir, key, u_sparse);
        }
        p_corrupt = normalize_sym_weighted(u_sparse);
    } else {
        p_corrupt = p_clean;
    }
    Matrix px_corrupt_fixed;  // valid when features are not reshuffled per epoch
    if (!shuffle_mode) px_corrupt_fixed = p_corrupt.multiply(g.features);
    Matrix ax_corrupt_fixed;
    if (cfg.encoder == EncoderKind::GcnSkip && !shuffle_mode)
        ax_corrupt_fixed = a_hat.multiply(g.features);

    ModelParams params = ModelParams::init(g.feature_dim(), cfg.embed_dim, cfg.encoder,
                                           cfg.hyper.strategy,
                                           std::min(cfg.hyper.clusters, n), cfg.hyper.est_hidden,
                                           cfg.seeds.init);
    const int communal_c = std::min(cfg.hyper.clusters, n);
    AdamState adam(cfg.lr);

    TrainReport report;
    ModelParams best = params;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    int since_improve = 0;
    const bool use_communal_iterative = family.has(SubgraphKind::Communal) &&
                                        cfg.hyper.strategy == CommunalStrategy::S2;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Tape tape;
        ModelLeaves leaves = register_leaves(tape, params);
        ParamBinding binding = bind_params(params, leaves);

        const std::uint64_t draw = cfg.corruption_redraw ? static_cast<std::uint64_t>(epoch) : 0;

        // clean encoding
        Tensor h = (cfg.encoder == EncoderKind::GcnSkip)
                       ? encode_skip_premultiplied(tape, px_clean, ax_clean, leaves)
                       : encode_premultiplied(tape, px_clean, leaves);

        // corrupted encoding (shared weights)
        Tensor h_neg;
        std::vector<int> feature_perm;
        if (shuffle_mode) {
            feature_perm = shuffle_permutation(n, cfg.seeds.corruption + draw);
            Matrix x_shuf(n, g.feature_dim());
            for (int i = 0; i < n; ++i) x_shuf.row(i) = g.features.row(feature_perm[i]);
            Matrix px_neg = p_corrupt.multiply(x_shuf);
            if (cfg.encoder == EncoderKind::GcnSkip) {
                Matrix ax_neg = a_hat.multiply(x_shuf);
                h_neg = encode_skip_premultiplied(tape, px_neg, ax_neg, leaves);
            } else {
                h_neg = encode_premultiplied(tape, px_neg, leaves);
            }
        } else {
            h_neg = (cfg.encoder == EncoderKind::GcnSkip)
                        ? encode_skip_premultiplied(tape, px_corrupt_fixed, ax_corrupt_fixed, leaves)
                        : encode_premultiplied(tape, px_corrupt_fixed, leaves);
        }

        // communal clustering state for this step
        Tensor gamma, centers;
        bool have_cluster_tensors = false;
        if (family.has(SubgraphKind::Communal)) {
            if (cfg.hyper.strategy == CommunalStrategy::S2) {
                if (params.communal_centers.size() == 0)
                    params.communal_centers =
                        kmeanspp_init(h.value(), communal_c, cfg.seeds.init + 17);
                ClusterState warm =
                    soft_kmeans(h.value(), communal_c, cfg.hyper.beta,
                                std::max(0, cfg.hyper.iters - 1), params.communal_centers,
                                cfg.hyper.similarity);
                auto res = soft_assign_on_tape(tape, h, warm.centers, cfg.hyper.beta,
                                               cfg.hyper.similarity);
                gamma = res.assignments;
                centers = res.centers;
                have_cluster_tensors = true;
            } else if (cfg.hyper.strategy == CommunalStrategy::S3) {
                gamma = estimation_network(tape, h, leaves.est);
                Tensor gamma_t = tape.transpose(gamma);
                Tensor mass = tape.add(tape.row_sums(gamma_t), Tensor::scalar(1e-12));
                centers = tape.div_rows(tape.matmul(gamma_t, h), mass);
                have_cluster_tensors = true;
            }
        }

        // subgraph representations
        PairBatch batch;
        batch.mode = cfg.loss;
        for (auto kind : cfg.kinds) {
            batch.positives.push_back(batched_repr(
                tape, kind, h, family, have_cluster_tensors ? &gamma : nullptr,
                have_cluster_tensors ? &centers : nullptr));
            if (kind == SubgraphKind::Communal && cfg.hyper.strategy != CommunalStrategy::S1) {
                // negatives are a row shuffle of the positive communal reps
                auto perm = shuffle_permutation(n, cfg.seeds.shuffle + draw);
                batch.negatives.push_back(tape.permute_rows(batch.positives.back(), perm));
            } else {
                batch.negatives.push_back(batched_repr(tape, kind, h_neg, family, nullptr, nullptr));
            }
        }

        LossResult lres = contrastive_loss(tape, batch, leaves.w_d);
        const double loss_value = lres.loss.item();
        if (!std::isfinite(loss_value))
            throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                     ": " + std::to_string(loss_value));
        report.loss_trace.push_back(loss_value);

        GradTable grads = tape.backward(lres.loss);
        std::vector<const Matrix*> grad_ptrs;
        grad_ptrs.reserve(binding.leaf_ids.size());
        for (int id : binding.leaf_ids) grad_ptrs.push_back(&grads.at(id));
        adam_step(binding.params, grad_ptrs, adam);

        if (use_communal_iterative && have_cluster_tensors)
            params.communal_centers = centers.value();  // warm start for the next epoch

        if (loss_value < best_loss - cfg.improve_tol) {
            best_loss = loss_value;
            best_epoch = epoch;
            best = params;
            since_improve = 0;
        } else {
            if (loss_value < best_loss) {
                best_loss = loss_value;
                best_epoch = epoch;
                best = params;
            }
            ++since_improve;
            if (since_improve >= cfg.patience) break;
        }
    }

    report.stopped_epoch = static_cast<int>(report.loss_trace.size());
    report.best_epoch = best_epoch;
    report.best_loss = best_loss;
    report.params = cfg.select_best && best_epoch >= 0 ? best : params;
    report.embeddings = embed(g, report.params);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

namespace {

void write_matrix(std::ofstream& out, const Matrix& m) {
    std::int64_t r = m.rows(), c = m.cols();
    out.write(reinterpret_cast<const char*>(&r), sizeof r);
    out.write(reinterpret_cast<const char*>(&c), sizeof c);
    out.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * r * c);
}

Matrix read_matrix(std::ifstream& in) {
    std::int64_t r = 0, c = 0;
    in.read(reinterpret_cast<char*>(&r), sizeof r);
    in.read(reinterpret_cast<char*>(&c), sizeof c);
    Matrix m(r, c);
    in.read(reinterpret_cast<char*>(m.data()), sizeof(double) * r * c);
    if (!in) throw std::runtime_error("truncated checkpoint");
    return m;
}

constexpr std::uint32_t kCheckpointMagic = 0x4d4e4331;  // "MNC1"

}  // namespace

void save_checkpoint(const ModelParams& params, std::uint64_t config_hash,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(reinterpret_cast<const char*>(&kCheckpointMagic), sizeof kCheckpointMagic);
    out.write(reinterpret_cast<const char*>(&config_hash), sizeof config_hash);
    std::uint8_t enc = params.encoder == EncoderKind::GcnSkip ? 1 : 0;
    std::uint8_t strat = params.strategy == CommunalStrategy::S1   ? 1
                         : params.strategy == CommunalStrategy::S2 ? 2
                                                                   : 3;
    std::uint8_t est = params.has_est ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&enc), 1);
    out.write(reinterpret_cast<const char*>(&strat), 1);
    out.write(reinterpret_cast<const char*>(&est), 1);
    write_matrix(out, params.w);
    write_matrix(out, params.w_skip);
    write_matrix(out, params.slope);
    write_matrix(out, params.w_d);
    write_matrix(out, params.communal_centers);
    if (params.has_est) {
        write_matrix(out, params.est.w1);
        write_matrix(out, params.est.b1);
        write_matrix(out, params.est.slope);
        write_matrix(out, params.est.w2);
        write_matrix(out, params.est.b2);
    }
}

ModelParams load_checkpoint(const std::string& path, std::uint64_t* config_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    std::uint32_t magic = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    if (magic != kCheckpointMagic) throw std::runtime_error("not a checkpoint file: " + path);
    std::uint64_t hash = 0;
    in.read(reinterpret_cast<char*>(&hash), sizeof hash);
    if (config_hash) *config_hash = hash;
    std::uint8_t enc = 0, strat = 0, est = 0;
    in.read(reinterpret_cast<char*>(&enc), 1);
    in.read(reinterpret_cast<char*>(&strat), 1);
    in.read(reinterpret_cast<char*>(&est), 1);
    ModelParams p;
    p.encoder = enc ? EncoderKind::GcnSkip : EncoderKind::Gcn;
    p.strategy = strat == 1 ? CommunalStrategy::S1
                 : strat == 2 ? CommunalStrategy::S2
                              : CommunalStrategy::S3;
    p.has_est = est != 0;
    p.w = read_matrix(in);
    p.w_skip = read_matrix(in);
    p.slope = read_matrix(in);
    p.w_d = read_matrix(in);
    p.communal_centers = read_matrix(in);
    if (p.has_est) {
        p.est.w1 = read_matrix(in);
        p.est.b1 = read_matrix(in);
        p.est.slope = read_matrix(in);
        p.est.w2 = read_matrix(in);
        p.est.b2 = read_matrix(in);
    }
    return p;
}

}  // namespace mncscl
