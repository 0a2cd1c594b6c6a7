// Citation-network acceptance runs. These need the real dataset bundles
// (cora, citeseer) which are not distributed with the source; point
// MNCSCL_DATA_DIR at a directory containing them, or place them under
// ./data. Without the bundles the whole binary reports a skip.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "core/eval.hpp"
#include "core/runner.hpp"
#include "core/trainer.hpp"

using namespace mncscl;
namespace fs = std::filesystem;

namespace {

constexpr int kSkipCode = 77;

int failures = 0;

void report(const char* name, bool passed, const std::string& detail) {
    std::printf("%s: %s (%s)\n", passed ? "PASS" : "FAIL", name, detail.c_str());
    if (!passed) ++failures;
}

std::string find_bundle(const std::string& name) {
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("MNCSCL_DATA_DIR")) roots.emplace_back(env);
    roots.emplace_back("data");
    for (const auto& root : roots) {
        fs::path candidate = root / name;
        if (fs::exists(candidate / "edges.tsv") && fs::exists(candidate / "features.csv"))
            return candidate.string();
    }
    return {};
}

TrainConfig reference_defaults(int l) {
    TrainConfig cfg;  // embed 512, clusters 128, beta 10, eta 0.01, d 1, lr 0.001, patience 20
    cfg.hyper.l = l;
    cfg.cache_dir = (fs::temp_directory_path() / "mncscl_dataset_cache").string();
    return cfg;
}

double node_accuracy(const Graph& g, const TrainConfig& cfg, int repeats) {
    TrainReport r = train(g, cfg);
    LogRegOptions opts;
    opts.repeats = repeats;
    return logreg_eval(r.embeddings, g.labels, *g.split, opts).metrics.at("accuracy").mean;
}

void check_cora_accuracy(const Graph& cora) {
    TrainConfig cfg = reference_defaults(20);
    double acc = node_accuracy(cora, cfg, 50);
    std::ostringstream d;
    d << "accuracy " << acc;
    if (acc >= 0.817) {
        report("cora node classification reaches accuracy >= 0.817", true, d.str());
        return;
    }
    // fallback band: beat raw features (0.566) by 20 points and a
    // single-pair run (basic + full only) by 0.5 points
    TrainConfig pair_cfg = cfg;
    pair_cfg.kinds = {SubgraphKind::Basic, SubgraphKind::Full};
    double pair_acc = node_accuracy(cora, pair_cfg, 50);
    d << ", single-pair baseline " << pair_acc;
    report("cora node classification reaches accuracy >= 0.817, or >= 0.766 and beats the "
           "single-pair baseline by 0.005",
           acc >= 0.766 && acc >= pair_acc + 0.005, d.str());
}

void check_citeseer_trend(const Graph& citeseer) {
    TrainConfig base = reference_defaults(10);
    base.max_epochs = 2000;
    static const SubgraphKind others[4] = {SubgraphKind::Neighboring, SubgraphKind::Intimate,
                                           SubgraphKind::Communal, SubgraphKind::Full};
    std::map<int, std::vector<double>> by_count;
    double five_acc = 0.0;
    for (unsigned mask = 1; mask < 16; ++mask) {
        TrainConfig cfg = base;
        cfg.kinds = {SubgraphKind::Basic};
        for (int b = 0; b < 4; ++b)
            if (mask & (1u << b)) cfg.kinds.push_back(others[b]);
        cfg.seeds.init += mask;
        cfg.seeds.shuffle += mask;
        cfg.seeds.corruption += mask;
        double acc = node_accuracy(citeseer, cfg, 10);
        by_count[static_cast<int>(cfg.kinds.size())].push_back(acc);
        if (cfg.kinds.size() == 5) five_acc = acc;
        std::printf("  citeseer %zu-subgraph combination %u: accuracy %.4f\n",
                    cfg.kinds.size(), mask, acc);
    }
    double two_mean = 0.0;
    for (double a : by_count.at(2)) two_mean += a;
    two_mean /= by_count.at(2).size();
    std::ostringstream d;
    d << "5-subgraph " << five_acc << " vs 2-subgraph mean " << two_mean;
    report("citeseer 5-subgraph run beats the 2-subgraph average by >= 0.005",
           five_acc >= two_mean + 0.005, d.str());
}

void check_cora_link(const Graph& cora) {
    LinkSplit split = make_link_split(cora, 0.05, 0.10, 1);
    Graph pruned = split.train_graph(cora);
    TrainConfig cfg = reference_defaults(20);
    cfg.cache_dir.clear();  // pruned structure must not reuse the full-graph cache
    TrainReport r = train(pruned, cfg);
    EvalReport metrics = link_eval(r.embeddings, split);
    double auc = metrics.metrics.at("auc").mean;
    std::ostringstream d;
    d << "auc " << auc << ", ap " << metrics.metrics.at("ap").mean;
    report("cora link prediction on the pruned graph reaches auc >= 0.90", auc >= 0.90,
           d.str());
}

}  // namespace

int main() {
    std::string cora_dir = find_bundle("cora");
    std::string citeseer_dir = find_bundle("citeseer");
    if (cora_dir.empty() && citeseer_dir.empty()) {
        std::printf("SKIP: no dataset bundles found (set MNCSCL_DATA_DIR or populate ./data "
                    "with cora/ and citeseer/)\n");
        return kSkipCode;
    }
    if (!cora_dir.empty()) {
        Graph cora = load_bundle(cora_dir);
        check_cora_accuracy(cora);
        check_cora_link(cora);
    } else {
        std::printf("SKIP: cora bundle not found, skipping its two checks\n");
    }
    if (!citeseer_dir.empty()) {
        Graph citeseer = load_bundle(citeseer_dir);
        check_citeseer_trend(citeseer);
    } else {
        std::printf("SKIP: citeseer bundle not found, skipping the trend check\n");
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
