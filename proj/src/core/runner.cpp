#include "core/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "core/cache.hpp"
#include "core/trainer.hpp"

namespace fs = std::filesystem;

namespace mncscl {

namespace {

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    return out;
}

std::string dataset_name(const RunConfig& cfg) {
    if (cfg.use_sbm) return "sbm";
    return fs::path(cfg.dataset_dir).filename().string();
}

Matrix obtain_embeddings(const Graph& g, const RunConfig& cfg, const std::string& out_dir,
                         bool* trained) {
    if (!cfg.checkpoint.empty()) {
        ModelParams params = load_checkpoint(cfg.checkpoint);
        if (trained) *trained = false;
        return embed(g, params);
    }
    TrainReport report = train(g, cfg.train);
    write_loss_trace(report.loss_trace, out_dir + "/loss_trace.csv");
    save_checkpoint(report.params, config_hash(cfg), out_dir + "/checkpoint.bin");
    if (trained) *trained = true;
    return report.embeddings;
}

void cmd_train(const Graph& g, const RunConfig& cfg) {
    TrainReport report = train(g, cfg.train);
    write_loss_trace(report.loss_trace, cfg.out_dir + "/loss_trace.csv");
    write_matrix_csv(report.embeddings, cfg.out_dir + "/embeddings.csv");
    save_checkpoint(report.params, config_hash(cfg), cfg.out_dir + "/checkpoint.bin");
    EvalReport summary;
    summary.dataset = dataset_name(cfg);
    summary.config_hash = config_hash(cfg);
    summary.metrics["best_loss"] = {report.best_loss, 0.0, 1};
    summary.metrics["best_epoch"] = {static_cast<double>(report.best_epoch), 0.0, 1};
    summary.metrics["stopped_epoch"] = {static_cast<double>(report.stopped_epoch), 0.0, 1};
    write_metrics_csv(summary, cfg.out_dir + "/metrics.csv");
    std::cout << "trained " << report.stopped_epoch << " epochs, best loss "
              << fmt(report.best_loss) << " at epoch " << report.best_epoch << " ("
              << fmt(report.wall_seconds) << "s)\n";
}

void cmd_embed(const Graph& g, const RunConfig& cfg) {
    if (cfg.checkpoint.empty())
        throw std::invalid_argument("embed requires a checkpoint in the config");
    ModelParams params = load_checkpoint(cfg.checkpoint);
    write_matrix_csv(embed(g, params), cfg.out_dir + "/embeddings.csv");
}

void cmd_eval_node(const Graph& g, const RunConfig& cfg) {
    if (!g.split) throw std::invalid_argument("eval-node requires a dataset split");
    if (g.labels.empty()) throw std::invalid_argument("eval-node requires labels");
    Matrix h = obtain_embeddings(g, cfg, cfg.out_dir, nullptr);
    write_matrix_csv(h, cfg.out_dir + "/embeddings.csv");
    LogRegOptions opts;
    opts.repeats = cfg.eval.classifier_repeats;
    opts.lr = cfg.eval.classifier_lr;
    opts.steps = cfg.eval.classifier_steps;
    opts.l2 = cfg.eval.classifier_l2;
    opts.seed = cfg.eval.seed;
    EvalReport report = logreg_eval(h, g.labels, *g.split, opts);
    report.dataset = dataset_name(cfg);
    report.config_hash = config_hash(cfg);
    write_metrics_csv(report, cfg.out_dir + "/metrics.csv");
    const auto& acc = report.metrics.at("accuracy");
    std::cout << "accuracy " << fmt(acc.mean) << " +/- " << fmt(acc.std_dev) << " over "
              << acc.repeats << " repeats\n";
}

void cmd_eval_link(const Graph& g, const RunConfig& cfg) {
    LinkSplit split = make_link_split(g, cfg.eval.link_val_frac, cfg.eval.link_test_frac,
                                      cfg.eval.seed);
    Graph pruned = split.train_graph(g);
    TrainReport report = train(pruned, cfg.train);
    write_loss_trace(report.loss_trace, cfg.out_dir + "/loss_trace.csv");
    write_matrix_csv(report.embeddings, cfg.out_dir + "/embeddings.csv");
    save_checkpoint(report.params, config_hash(cfg), cfg.out_dir + "/checkpoint.bin");
    EvalReport metrics = link_eval(report.embeddings, split);
    metrics.dataset = dataset_name(cfg);
    metrics.config_hash = config_hash(cfg);
    write_metrics_csv(metrics, cfg.out_dir + "/metrics.csv");
    std::cout << "auc " << fmt(metrics.metrics.at("auc").mean) << ", ap "
              << fmt(metrics.metrics.at("ap").mean) << "\n";
}

void cmd_ablate(const Graph& g, const RunConfig& cfg) {
    if (!g.split) throw std::invalid_argument("ablate requires a dataset split");
    if (g.labels.empty()) throw std::invalid_argument("ablate requires labels");
    static const SubgraphKind others[4] = {SubgraphKind::Neighboring, SubgraphKind::Intimate,
                                           SubgraphKind::Communal, SubgraphKind::Full};
    auto out = open_out(cfg.out_dir + "/ablation.csv");
    out << "combination,kinds,best_loss,accuracy_mean,accuracy_std\n";
    int index = 0;
    for (unsigned mask = 1; mask < 16; ++mask, ++index) {
        RunConfig c = cfg;
        c.train.kinds = {SubgraphKind::Basic};
        for (int b = 0; b < 4; ++b)
            if (mask & (1u << b)) c.train.kinds.push_back(others[b]);
        c.train.seeds.init = cfg.train.seeds.init + index;
        c.train.seeds.shuffle = cfg.train.seeds.shuffle + index;
        c.train.seeds.corruption = cfg.train.seeds.corruption + index;

        TrainReport report = train(g, c.train);
        LogRegOptions opts;
        opts.repeats = cfg.eval.classifier_repeats;
        opts.lr = cfg.eval.classifier_lr;
        opts.steps = cfg.eval.classifier_steps;
        opts.l2 = cfg.eval.classifier_l2;
        opts.seed = cfg.eval.seed;
        EvalReport eval = logreg_eval(report.embeddings, g.labels, *g.split, opts);
        const auto& acc = eval.metrics.at("accuracy");

        std::string label;
        for (auto k : c.train.kinds) {
            if (!label.empty()) label += "+";
            label += to_string(k);
        }
        out << label << "," << c.train.kinds.size() << "," << fmt(report.best_loss) << ","
            << fmt(acc.mean) << "," << fmt(acc.std_dev) << "\n";
        std::cout << label << ": accuracy " << fmt(acc.mean) << "\n";
    }
}

int cmd_gradcheck(const RunConfig& cfg) {
    std::vector<std::string> lines;
    auto reports = run_gradcheck_suite(lines);
    auto out = open_out(cfg.out_dir + "/gradcheck.txt");
    bool all_passed = true;
    for (const auto& line : lines) {
        out << line << "\n";
        std::cout << line << "\n";
    }
    for (const auto& r : reports) all_passed &= r.passed;
    return all_passed ? 0 : 2;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
    RunResult result;
    try {
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        write_config_echo(cfg, cfg.out_dir + "/config_echo.json");
        if (cfg.command == "gradcheck") {
            result.exit_code = cmd_gradcheck(cfg);
            if (result.exit_code != 0) result.error = "gradient check failed";
            return result;
        }
        Graph g = load_dataset(cfg);
        if (cfg.command == "train")
            cmd_train(g, cfg);
        else if (cfg.command == "embed")
            cmd_embed(g, cfg);
        else if (cfg.command == "eval-node")
            cmd_eval_node(g, cfg);
        else if (cfg.command == "eval-link")
            cmd_eval_link(g, cfg);
        else if (cfg.command == "ablate")
            cmd_ablate(g, cfg);
    } catch (const std::invalid_argument& e) {
        result.exit_code = 1;
        result.error = e.what();
    } catch (const std::exception& e) {
        result.exit_code = 2;
        result.error = e.what();
    }
    return result;
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
    auto out = open_out(path);
    out << std::setprecision(17);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << m(i, j);
        }
        out << "\n";
    }
}

void write_loss_trace(const std::vector<double>& trace, const std::string& path) {
    auto out = open_out(path);
    out << "epoch,loss\n" << std::setprecision(17);
    for (std::size_t i = 0; i < trace.size(); ++i) out << i << "," << trace[i] << "\n";
}

void write_metrics_csv(const EvalReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "dataset,config_hash,metric,mean,std,repeats\n" << std::setprecision(17);
    for (const auto& [name, v] : report.metrics)
        out << report.dataset << "," << report.config_hash << "," << name << "," << v.mean << ","
            << v.std_dev << "," << v.repeats << "\n";
}

// ---- gradient-check suites ---------------------------------------------

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = dist(rng);
    return m;
}

/// Shifts entries away from zero so kinked primitives stay locally smooth.
Matrix away_from_zero(Matrix m, double margin = 0.2) {
    return m.unaryExpr([margin](double x) { return x >= 0 ? x + margin : x - margin; });
}

/// Deterministic weighted reduction to a scalar through already-simple ops.
Tensor reduce(Tape& tape, const Tensor& t, std::mt19937_64& rng) {
    Matrix w = random_matrix(t.rows(), t.cols(), rng);
    return tape.sum(tape.mul(t, Tensor(w)));
}

}  // namespace

std::vector<CheckedComputation> primitive_check_suite(std::uint64_t seed) {
    std::vector<CheckedComputation> suite;
    std::mt19937_64 rng(seed);
    auto add = [&](std::string name, std::vector<Matrix> inputs,
                   std::function<Tensor(Tape&, const std::vector<Tensor>&)> build) {
        suite.push_back({std::move(name), std::move(inputs), std::move(build)});
    };
    const std::uint64_t rseed = rng();

    add("matmul", {random_matrix(3, 4, rng), random_matrix(4, 2, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.matmul(x[0], x[1]), r);
        });

    {
        SparseMatrix s = SparseMatrix::from_triplets(
            3, 3, {{0, 1, 2.0}, {1, 0, -1.5}, {1, 2, 0.5}, {2, 2, 1.0}});
        add("spmm", {random_matrix(3, 2, rng)}, [s, rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.spmm(s, x[0]), r);
        });
    }

    add("add_same_shape", {random_matrix(3, 2, rng), random_matrix(3, 2, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.add(x[0], x[1]), r);
        });
    add("add_row_broadcast", {random_matrix(3, 2, rng), random_matrix(1, 2, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.add(x[0], x[1]), r);
        });
    add("add_scalar_broadcast", {random_matrix(3, 2, rng), random_matrix(1, 1, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.add(x[0], x[1]), r);
        });
    add("scale", {random_matrix(3, 2, rng)}, [rseed](Tape& t, const std::vector<Tensor>& x) {
        std::mt19937_64 r(rseed);
        return reduce(t, t.scale(x[0], -1.7), r);
    });
    add("mul", {random_matrix(3, 2, rng), random_matrix(3, 2, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.mul(x[0], x[1]), r);
        });
    add("prelu", {away_from_zero(random_matrix(3, 3, rng)), Matrix::Constant(1, 1, 0.25)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.prelu(x[0], x[1]), r);
        });
    add("sigmoid", {random_matrix(3, 2, rng, -3, 3)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.sigmoid(x[0]), r);
        });
    add("row_softmax", {random_matrix(3, 4, rng, -2, 2)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.row_softmax(x[0]), r);
        });
    {
        IndexSet idx(std::vector<int>{0, 2, 3});
        add("mean_rows", {random_matrix(4, 3, rng)},
            [idx, rseed](Tape& t, const std::vector<Tensor>& x) {
                std::mt19937_64 r(rseed);
                return reduce(t, t.mean_rows(x[0], idx), r);
            });
    }
    add("bilinear", {random_matrix(1, 3, rng), random_matrix(3, 3, rng), random_matrix(1, 3, rng)},
        [](Tape& t, const std::vector<Tensor>& x) { return t.bilinear(x[0], x[1], x[2]); });
    add("log", {random_matrix(3, 2, rng, 0.3, 2.0)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.log(x[0]), r);
        });
    add("neg_log_one_minus", {random_matrix(3, 2, rng, 0.05, 0.7)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.neg_log_one_minus(x[0]), r);
        });
    add("clamp", {random_matrix(4, 3, rng, 0.0, 1.0)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.clamp(x[0], 0.25, 0.75), r);
        });
    add("sum", {random_matrix(3, 4, rng)},
        [](Tape& t, const std::vector<Tensor>& x) { return t.sum(x[0]); });
    add("row_sums", {random_matrix(3, 4, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.row_sums(x[0]), r);
        });
    add("transpose", {random_matrix(3, 4, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.transpose(x[0]), r);
        });
    add("div_rows", {random_matrix(3, 4, rng), random_matrix(3, 1, rng, 0.5, 2.0)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.div_rows(x[0], x[1]), r);
        });
    add("pairwise_sqdist", {random_matrix(3, 2, rng), random_matrix(4, 2, rng)},
        [rseed](Tape& t, const std::vector<Tensor>& x) {
            std::mt19937_64 r(rseed);
            return reduce(t, t.pairwise_sqdist(x[0], x[1]), r);
        });
    {
        std::vector<int> perm = {2, 0, 3, 1};
        add("permute_rows", {random_matrix(4, 3, rng)},
            [perm, rseed](Tape& t, const std::vector<Tensor>& x) {
                std::mt19937_64 r(rseed);
                return reduce(t, t.permute_rows(x[0], perm), r);
            });
    }
    return suite;
}

CheckedComputation full_loss_check(const Graph& g, const TrainConfig& cfg) {
    cfg.validate();
    g.validate();
    const int n = g.num_nodes;

    SparseMatrix p_clean = normalize_sym(g);
    Matrix px_clean = p_clean.multiply(g.features);
    const bool skip = cfg.encoder == EncoderKind::GcnSkip;
    Matrix ax_clean;
    SparseMatrix a_hat;
    if (skip) {
        std::vector<std::tuple<int, int, double>> t;
        const auto& off = g.adjacency.offsets();
        const auto& ci = g.adjacency.col_indices();
        const auto& vals = g.adjacency.values();
        for (int r = 0; r < n; ++r) {
            bool diag = false;
            for (auto k = off[r]; k < off[r + 1]; ++k) {
                t.emplace_back(r, ci[k], vals[k]);
                diag |= (ci[k] == r);
            }
            if (!diag) t.emplace_back(r, r, 1.0);
        }
        a_hat = SparseMatrix::from_triplets(n, n, std::move(t));
        ax_clean = a_hat.multiply(g.features);
    }

    SparseMatrix abar = col_normalize(g);
    DiffusionMatrix ppr;
    const DiffusionMatrix* ppr_ptr = nullptr;
    for (auto k : cfg.kinds)
        if (k == SubgraphKind::Intimate && !ppr_ptr) {
            ppr = ppr_matrix(abar, cfg.ppr_alpha);
            ppr_ptr = &ppr;
        }
    SubgraphFamily family = build_family(g, cfg.kinds, cfg.hyper, ppr_ptr, cfg.seeds.init);

    const bool diffusion_mode = cfg.corruption == CorruptionMode::Diffusion ||
                                cfg.corruption == CorruptionMode::DiffusionPlusShuffle;
    const bool shuffle_mode = cfg.corruption == CorruptionMode::Shuffle ||
                              cfg.corruption == CorruptionMode::DiffusionPlusShuffle;
    SparseMatrix p_corrupt = p_clean;
    if (diffusion_mode)
        p_corrupt = normalize_sym_weighted(
            sparsify_topk(heat_matrix(abar, cfg.heat_t, cfg.heat_order), cfg.diffusion_topk));
    Matrix x_neg = g.features;
    if (shuffle_mode) {
        auto perm = shuffle_permutation(n, cfg.seeds.corruption);
        for (int i = 0; i < n; ++i) x_neg.row(i) = g.features.row(perm[i]);
    }
    Matrix px_neg = p_corrupt.multiply(x_neg);
    Matrix ax_neg;
    if (skip) ax_neg = a_hat.multiply(x_neg);

    const int communal_c = std::min(cfg.hyper.clusters, n);
    ModelParams params =
        ModelParams::init(g.feature_dim(), cfg.embed_dim, cfg.encoder, cfg.hyper.strategy,
                          communal_c, cfg.hyper.est_hidden, cfg.seeds.init);

    const bool communal = family.has(SubgraphKind::Communal);
    const bool s2 = communal && cfg.hyper.strategy == CommunalStrategy::S2;
    const bool s3 = communal && cfg.hyper.strategy == CommunalStrategy::S3;

    // Warm centers frozen at the unperturbed parameters so that only the
    // on-tape assignment and center update are differentiated.
    Matrix warm_centers;
    if (s2) {
        Matrix pre = px_clean * params.w;
        if (skip) pre += ax_clean * params.w_skip;
        const double slope = params.slope(0, 0);
        Matrix h0 = pre.unaryExpr([slope](double x) { return x > 0 ? x : slope * x; });
        Matrix init_centers = kmeanspp_init(h0, communal_c, cfg.seeds.init + 17);
        warm_centers = soft_kmeans(h0, communal_c, cfg.hyper.beta,
                                   std::max(0, cfg.hyper.iters - 1), init_centers,
                                   cfg.hyper.similarity)
                           .centers;
    }
    std::vector<int> neg_perm;
    if (communal && cfg.hyper.strategy != CommunalStrategy::S1)
        neg_perm = shuffle_permutation(n, cfg.seeds.shuffle);

    CheckedComputation comp;
    comp.name = std::string("full_loss_") + to_string(cfg.loss);
    comp.inputs = {params.w, params.slope, params.w_d};
    if (skip) comp.inputs.push_back(params.w_skip);
    if (s3) {
        comp.inputs.push_back(params.est.w1);
        comp.inputs.push_back(params.est.b1);
        comp.inputs.push_back(params.est.slope);
        comp.inputs.push_back(params.est.w2);
        comp.inputs.push_back(params.est.b2);
    }

    auto hyper = cfg.hyper;
    auto kinds = cfg.kinds;
    auto loss_mode = cfg.loss;
    comp.build = [=](Tape& tape, const std::vector<Tensor>& leaves) {
        ModelLeaves ml;
        ml.w = leaves[0];
        ml.slope = leaves[1];
        ml.w_d = leaves[2];
        std::size_t next = 3;
        if (skip) {
            ml.w_skip = leaves[next++];
            ml.has_skip = true;
        }
        if (s3) {
            ml.est.w1 = leaves[next++];
            ml.est.b1 = leaves[next++];
            ml.est.slope = leaves[next++];
            ml.est.w2 = leaves[next++];
            ml.est.b2 = leaves[next++];
            ml.has_est = true;
        }
        Tensor h = skip ? encode_skip_premultiplied(tape, px_clean, ax_clean, ml)
                        : encode_premultiplied(tape, px_clean, ml);
        Tensor h_neg = skip ? encode_skip_premultiplied(tape, px_neg, ax_neg, ml)
                            : encode_premultiplied(tape, px_neg, ml);

        Tensor gamma, centers;
        bool have_cluster_tensors = false;
        if (s2) {
            auto res = soft_assign_on_tape(tape, h, warm_centers, hyper.beta, hyper.similarity);
            gamma = res.assignments;
            centers = res.centers;
            have_cluster_tensors = true;
        } else if (s3) {
            gamma = estimation_network(tape, h, ml.est);
            Tensor gamma_t = tape.transpose(gamma);
            Tensor mass = tape.add(tape.row_sums(gamma_t), Tensor::scalar(1e-12));
            centers = tape.div_rows(tape.matmul(gamma_t, h), mass);
            have_cluster_tensors = true;
        }

        PairBatch batch;
        batch.mode = loss_mode;
        for (auto kind : kinds) {
            batch.positives.push_back(batched_repr(tape, kind, h, family,
                                                   have_cluster_tensors ? &gamma : nullptr,
                                                   have_cluster_tensors ? &centers : nullptr));
            if (kind == SubgraphKind::Communal && hyper.strategy != CommunalStrategy::S1)
                batch.negatives.push_back(tape.permute_rows(batch.positives.back(), neg_perm));
            else
                batch.negatives.push_back(
                    batched_repr(tape, kind, h_neg, family, nullptr, nullptr));
        }
        return contrastive_loss(tape, batch, ml.w_d).loss;
    };
    return comp;
}

std::vector<GradCheckReport> run_gradcheck_suite(std::vector<std::string>& lines,
                                                 double tolerance) {
    std::vector<GradCheckReport> reports;
    for (const auto& comp : primitive_check_suite(20240601))
        reports.push_back(grad_check(comp, tolerance));

    Graph g = synth_sbm(3, 4, 0.6, 0.1, 8, 5);
    TrainConfig cfg;
    cfg.embed_dim = 6;
    cfg.hyper.l = 4;
    cfg.hyper.clusters = 3;
    cfg.hyper.iters = 3;
    cfg.hyper.est_hidden = 8;
    cfg.diffusion_topk = 8;
    for (auto mode : {LossMode::CoreView, LossMode::FullGraph}) {
        cfg.loss = mode;
        reports.push_back(grad_check(full_loss_check(g, cfg), tolerance));
    }

    std::ostringstream line;
    for (const auto& r : reports) {
        line.str("");
        line << (r.passed ? "PASS" : "FAIL") << " " << r.name << " (worst rel err "
             << std::setprecision(3) << r.worst_error << ")";
        lines.push_back(line.str());
    }
    return reports;
}

}  // namespace mncscl
