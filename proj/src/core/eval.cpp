#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace mncscl {

namespace {

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (int i = 0; i < logits.rows(); ++i) {
        Eigen::RowVectorXd row = logits.row(i);
        Eigen::RowVectorXd e = (row.array() - row.maxCoeff()).exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

MetricValue summarize(const std::vector<double>& xs) {
    MetricValue m;
    m.repeats = static_cast<int>(xs.size());
    m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0;
    for (double x : xs) var += (x - m.mean) * (x - m.mean);
    m.std_dev = xs.size() > 1 ? std::sqrt(var / xs.size()) : 0.0;
    return m;
}

}  // namespace

EvalReport logreg_eval(const Matrix& h, const std::vector<int>& labels, const Split& split,
                       const LogRegOptions& opts) {
    if (labels.empty()) throw std::invalid_argument("logreg_eval requires labels");
    std::vector<int> train_ids, test_ids;
    for (int i : split.train)
        if (labels[i] >= 0) train_ids.push_back(i);
    for (int i : split.test)
        if (labels[i] >= 0) test_ids.push_back(i);
    if (train_ids.empty() || test_ids.empty())
        throw std::invalid_argument("logreg_eval requires labeled train and test nodes");

    int num_classes = 0;
    for (int y : labels) num_classes = std::max(num_classes, y + 1);
    const int f = static_cast<int>(h.cols());
    const long m = static_cast<long>(train_ids.size());

    Matrix x_train(m, f);
    Matrix y_train = Matrix::Zero(m, num_classes);
    for (long i = 0; i < m; ++i) {
        x_train.row(i) = h.row(train_ids[i]);
        y_train(i, labels[train_ids[i]]) = 1.0;
    }

    std::vector<double> accs;
    for (int rep = 0; rep < opts.repeats; ++rep) {
        std::mt19937_64 rng(opts.seed + rep);
        std::normal_distribution<double> init(0.0, 0.01);
        Matrix w(f, num_classes);
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < num_classes; ++j) w(i, j) = init(rng);
        Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(num_classes);

        Matrix mw = Matrix::Zero(f, num_classes), vw = mw;
        Eigen::RowVectorXd mb = b, vb = b;
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        for (int step = 1; step <= opts.steps; ++step) {
            Matrix logits = (x_train * w).rowwise() + b;
            Matrix probs = softmax_rows(logits);
            Matrix diff = (probs - y_train) / static_cast<double>(m);
            Matrix gw = x_train.transpose() * diff + opts.l2 * w;
            Eigen::RowVectorXd gb = diff.colwise().sum();
            const double c1 = 1 - std::pow(b1, step), c2 = 1 - std::pow(b2, step);
            mw = b1 * mw + (1 - b1) * gw;
            vw = b2 * vw + (1 - b2) * gw.cwiseProduct(gw);
            w.array() -= opts.lr * (mw / c1).array() / ((vw / c2).array().sqrt() + eps);
            mb = b1 * mb + (1 - b1) * gb;
            vb = b2 * vb + (1 - b2) * gb.cwiseProduct(gb);
            b.array() -= opts.lr * (mb / c1).array() / ((vb / c2).array().sqrt() + eps);
        }

        int correct = 0;
        for (int i : test_ids) {
            Eigen::RowVectorXd logits = h.row(i) * w + b;
            int pred = 0;
            logits.maxCoeff(&pred);
            if (pred == labels[i]) ++correct;
        }
        accs.push_back(static_cast<double>(correct) / test_ids.size());
    }

    EvalReport report;
    report.metrics["accuracy"] = summarize(accs);
    return report;
}

double micro_f1(const std::vector<std::vector<int>>& predictions,
                const std::vector<std::vector<int>>& truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        std::set<int> p(predictions[i].begin(), predictions[i].end());
        std::set<int> t(truth[i].begin(), truth[i].end());
        for (int y : p) (t.count(y) ? tp : fp) += 1;
        for (int y : t)
            if (!p.count(y)) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / (tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

Graph LinkSplit::train_graph(const Graph& g) const {
    Graph out = g;
    std::vector<std::tuple<int, int, double>> t;
    t.reserve(train_edges.size() * 2);
    for (auto [u, v] : train_edges) {
        t.emplace_back(u, v, 1.0);
        if (u != v) t.emplace_back(v, u, 1.0);
    }
    out.adjacency = SparseMatrix::from_triplets(g.num_nodes, g.num_nodes, std::move(t));
    return out;
}

LinkSplit make_link_split(const Graph& g, double val_frac, double test_frac, std::uint64_t seed) {
    std::vector<std::pair<int, int>> edges;
    const auto& off = g.adjacency.offsets();
    const auto& ci = g.adjacency.col_indices();
    for (int r = 0; r < g.num_nodes; ++r)
        for (auto k = off[r]; k < off[r + 1]; ++k)
            if (ci[k] > r) edges.emplace_back(r, ci[k]);
    const long e = static_cast<long>(edges.size());
    const long n_val = std::lround(val_frac * e);
    const long n_test = std::lround(test_frac * e);
    if (n_val + n_test >= e)
        throw std::invalid_argument("graph too small for requested split fractions");

    std::mt19937_64 rng(seed);
    std::shuffle(edges.begin(), edges.end(), rng);

    LinkSplit split;
    split.seed = seed;
    split.val_edges.assign(edges.begin(), edges.begin() + n_val);
    split.test_edges.assign(edges.begin() + n_val, edges.begin() + n_val + n_test);
    split.train_edges.assign(edges.begin() + n_val + n_test, edges.end());

    std::set<std::pair<int, int>> edge_set(edges.begin(), edges.end());
    std::set<std::pair<int, int>> taken;
    auto sample_nonedges = [&](long count) {
        std::vector<std::pair<int, int>> out;
        std::uniform_int_distribution<int> pick(0, g.num_nodes - 1);
        long attempts = 0;
        const long max_attempts = 1000 * count + 10000;
        while (static_cast<long>(out.size()) < count) {
            if (++attempts > max_attempts)
                throw std::runtime_error("graph too dense to sample non-edges");
            int u = pick(rng), v = pick(rng);
            if (u == v) continue;
            if (u > v) std::swap(u, v);
            std::pair<int, int> p{u, v};
            if (edge_set.count(p) || taken.count(p)) continue;
            taken.insert(p);
            out.push_back(p);
        }
        return out;
    };
    split.val_nonedges = sample_nonedges(n_val);
    split.test_nonedges = sample_nonedges(n_test);
    return split;
}

double auc_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty())
        throw std::invalid_argument("empty score set for AUC");
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(pos_scores.size() + neg_scores.size());
    for (double s : pos_scores) items.push_back({s, true});
    for (double s : neg_scores) items.push_back({s, false});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.score < b.score; });
    // average ranks over tied groups (Mann-Whitney U)
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < items.size()) {
        std::size_t j = i;
        while (j < items.size() && items[j].score == items[i].score) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (items[k].positive) rank_sum_pos += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(pos_scores.size());
    const double n = static_cast<double>(neg_scores.size());
    const double u = rank_sum_pos - p * (p + 1) / 2.0;
    return u / (p * n);
}

double ap_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty()) throw std::invalid_argument("empty positive set for AP");
    struct Item {
        double score;
        bool positive;
        std::size_t idx;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < pos_scores.size(); ++k) items.push_back({pos_scores[k], true, k});
    for (std::size_t k = 0; k < neg_scores.size(); ++k)
        items.push_back({neg_scores[k], false, pos_scores.size() + k});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.idx < b.idx;
    });
    double ap = 0.0;
    long tp = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        if (items[k].positive) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(k + 1);
        }
    }
    return ap / static_cast<double>(pos_scores.size());
}

EvalReport link_eval(const Matrix& h, const LinkSplit& split) {
    if (split.test_edges.empty()) throw std::invalid_argument("empty test edge set");
    auto score = [&](const std::vector<std::pair<int, int>>& pairs) {
        std::vector<double> out;
        out.reserve(pairs.size());
        for (auto [u, v] : pairs) {
            double dot = h.row(u).dot(h.row(v));
            out.push_back(1.0 / (1.0 + std::exp(-dot)));
        }
        return out;
    };
    auto pos = score(split.test_edges);
    auto neg = score(split.test_nonedges);
    EvalReport report;
    report.metrics["auc"] = {auc_score(pos, neg), 0.0, 1};
    report.metrics["ap"] = {ap_score(pos, neg), 0.0, 1};
    if (!split.val_edges.empty() && !split.val_nonedges.empty()) {
        auto vpos = score(split.val_edges);
        auto vneg = score(split.val_nonedges);
        report.metrics["val_auc"] = {auc_score(vpos, vneg), 0.0, 1};
        report.metrics["val_ap"] = {ap_score(vpos, vneg), 0.0, 1};
    }
    return report;
}

}  // namespace mncscl
