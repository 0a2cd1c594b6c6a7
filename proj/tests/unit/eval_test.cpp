#include <doctest.h>

#include <random>
#include <set>

#include "core/eval.hpp"

using namespace mncscl;

TEST_CASE("micro F1 formula cases") {
    CHECK(micro_f1({{1}, {2}}, {{1}, {2}}) == 1.0);
    // TP=2, FP=1, FN=1 -> precision = recall = 2/3 -> F1 = 2/3
    CHECK(micro_f1({{1, 3}, {2}}, {{1}, {2, 4}}) == doctest::Approx(2.0 / 3.0));
    CHECK(micro_f1({{}, {}}, {{1}, {2}}) == 0.0);
    CHECK_THROWS(micro_f1({{1}}, {{1}, {2}}));
}

TEST_CASE("AUC matches brute-force pairwise comparison including ties") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> quantized(0, 9);  // forces ties
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pos, neg;
        for (int i = 0; i < 12; ++i) pos.push_back(quantized(rng) / 10.0);
        for (int i = 0; i < 9; ++i) neg.push_back(quantized(rng) / 10.0);
        double brute = 0.0;
        for (double p : pos)
            for (double q : neg) brute += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
        brute /= pos.size() * neg.size();
        CHECK(auc_score(pos, neg) == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("AUC endpoints") {
    CHECK(auc_score({0.9, 0.8}, {0.1, 0.2}) == 1.0);
    CHECK(auc_score({0.5, 0.5}, {0.5, 0.5}) == 0.5);
    CHECK_THROWS(auc_score({}, {0.5}));
}

TEST_CASE("AP is invariant to monotone score transformations") {
    std::vector<double> pos = {0.9, 0.4, 0.35, 0.7};
    std::vector<double> neg = {0.6, 0.3, 0.2, 0.5, 0.1};
    auto squash = [](std::vector<double> v) {
        for (double& x : v) x = x * x * 10 + 1;  // strictly increasing on [0,1]
        return v;
    };
    CHECK(ap_score(pos, neg) == doctest::Approx(ap_score(squash(pos), squash(neg))));
    CHECK(ap_score({0.9, 0.8}, {0.1}) == 1.0);
}

TEST_CASE("link split partitions edges and avoids leakage") {
    Graph g = synth_sbm(3, 20, 0.3, 0.05, 4, 301);
    LinkSplit split = make_link_split(g, 0.1, 0.2, 9);
    std::set<std::pair<int, int>> train(split.train_edges.begin(), split.train_edges.end());
    std::set<std::pair<int, int>> all = train;
    for (auto e : split.val_edges) CHECK(all.insert(e).second);
    for (auto e : split.test_edges) CHECK(all.insert(e).second);

    Graph pruned = split.train_graph(g);
    for (auto [u, v] : split.test_edges) CHECK(pruned.adjacency.coeff(u, v) == 0.0);
    for (auto [u, v] : split.train_edges) CHECK(pruned.adjacency.coeff(u, v) == 1.0);
    for (auto e : split.test_nonedges) CHECK(!all.count(e));
    CHECK(split.test_nonedges.size() == split.test_edges.size());

    LinkSplit again = make_link_split(g, 0.1, 0.2, 9);
    CHECK(again.test_edges == split.test_edges);
}

TEST_CASE("link split rejects fractions that empty the train graph") {
    Graph g = synth_sbm(2, 4, 0.9, 0.5, 4, 303);
    CHECK_THROWS_AS(make_link_split(g, 0.5, 0.5, 1), std::invalid_argument);
}

TEST_CASE("separable embeddings classify perfectly") {
    const int n = 60;
    Matrix h = Matrix::Zero(n, 2);
    std::vector<int> labels(n);
    Split split;
    for (int i = 0; i < n; ++i) {
        labels[i] = i % 2;
        h(i, labels[i]) = 1.0;
        (i < n / 2 ? split.train : split.test).push_back(i);
    }
    LogRegOptions opts;
    opts.repeats = 3;
    EvalReport r = logreg_eval(h, labels, split, opts);
    CHECK(r.metrics.at("accuracy").mean == 1.0);
    CHECK(r.metrics.at("accuracy").std_dev == 0.0);
}

TEST_CASE("labels independent of embeddings score near chance") {
    std::mt19937_64 rng(11);
    const int n = 800;
    Matrix h = Matrix::Random(n, 8);
    std::vector<int> labels(n);
    Split split;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < n; ++i) {
        labels[i] = coin(rng);
        (i < n / 2 ? split.train : split.test).push_back(i);
    }
    LogRegOptions opts;
    opts.repeats = 3;
    opts.steps = 150;
    double acc = logreg_eval(h, labels, split, opts).metrics.at("accuracy").mean;
    CHECK(acc > 0.40);
    CHECK(acc < 0.60);
}

TEST_CASE("unlabeled nodes are excluded from the classifier") {
    Matrix h = Matrix::Random(10, 3);
    std::vector<int> labels(10, -1);
    Split split;
    for (int i = 0; i < 10; ++i) (i < 5 ? split.train : split.test).push_back(i);
    CHECK_THROWS_AS(logreg_eval(h, labels, split, LogRegOptions{}), std::invalid_argument);
}

TEST_CASE("link_eval reports auc and ap on the test pairs") {
    Graph g = synth_sbm(2, 15, 0.5, 0.05, 4, 307);
    LinkSplit split = make_link_split(g, 0.1, 0.2, 3);
    Matrix h = Matrix::Random(g.num_nodes, 6);
    EvalReport r = link_eval(h, split);
    for (const char* m : {"auc", "ap", "val_auc", "val_ap"}) {
        CHECK(r.metrics.at(m).mean >= 0.0);
        CHECK(r.metrics.at(m).mean <= 1.0);
    }
}
