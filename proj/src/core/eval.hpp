#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/graph.hpp"

namespace mncscl {

struct MetricValue {
    double mean = 0.0;
    double std_dev = 0.0;
    int repeats = 1;
};

struct EvalReport {
    std::map<std::string, MetricValue> metrics;
    std::string dataset;
    std::uint64_t config_hash = 0;
};

struct LogRegOptions {
    int repeats = 50;
    double lr = 0.01;
    int steps = 300;
    double l2 = 1e-5;
    std::uint64_t seed = 1;
};

/// Multinomial logistic regression on frozen embeddings; test accuracy
/// mean and std over per-repeat seeds.
EvalReport logreg_eval(const Matrix& h, const std::vector<int>& labels, const Split& split,
                       const LogRegOptions& opts);

/// Micro-averaged F1 over pooled (instance, label) decisions.
double micro_f1(const std::vector<std::vector<int>>& predictions,
                const std::vector<std::vector<int>>& truth);

struct LinkSplit {
    std::vector<std::pair<int, int>> train_edges;
    std::vector<std::pair<int, int>> val_edges;
    std::vector<std::pair<int, int>> test_edges;
    std::vector<std::pair<int, int>> val_nonedges;
    std::vector<std::pair<int, int>> test_nonedges;
    std::uint64_t seed = 0;

    /// Original graph with val/test edges removed (features, labels kept).
    Graph train_graph(const Graph& g) const;
};

LinkSplit make_link_split(const Graph& g, double val_frac, double test_frac, std::uint64_t seed);

double auc_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);
double ap_score(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

/// Edge score sigma(h_u . h_v); AUC by rank statistic, AP by step
/// interpolation, on the test edges vs sampled non-edges.
EvalReport link_eval(const Matrix& h, const LinkSplit& split);

}  // namespace mncscl
