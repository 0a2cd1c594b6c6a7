#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/runner.hpp"

using namespace mncscl;
namespace fs = std::filesystem;

namespace {

struct OutDir {
    fs::path path = fs::temp_directory_path() / "mncscl_runner_unit";
    OutDir() { fs::remove_all(path); }
    ~OutDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

RunConfig tiny(const std::string& command, const std::string& out) {
    RunConfig cfg;
    cfg.command = command;
    cfg.use_sbm = true;
    cfg.sbm = {2, 8, 0.5, 0.05, 6, 3};
    cfg.out_dir = out;
    cfg.train.embed_dim = 8;
    cfg.train.max_epochs = 5;
    cfg.train.hyper.l = 4;
    cfg.train.hyper.clusters = 3;
    cfg.train.hyper.iters = 2;
    cfg.train.diffusion_topk = 8;
    cfg.eval.classifier_repeats = 2;
    cfg.eval.link_val_frac = 0.05;
    cfg.eval.link_test_frac = 0.15;
    return cfg;
}

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

}  // namespace

TEST_CASE("train writes the full artifact set") {
    OutDir dir;
    RunResult r = run(tiny("train", dir.str()));
    CHECK(r.exit_code == 0);
    for (const char* f : {"config_echo.json", "loss_trace.csv", "embeddings.csv",
                          "checkpoint.bin", "metrics.csv"})
        CHECK(fs::exists(dir.path / f));
    CHECK(count_lines(dir.path / "loss_trace.csv") == 6);  // header + 5 epochs
    CHECK(count_lines(dir.path / "embeddings.csv") == 16);
}

TEST_CASE("eval-node reports accuracy, embed replays a checkpoint") {
    OutDir dir;
    RunConfig cfg = tiny("eval-node", dir.str());
    CHECK(run(cfg).exit_code == 0);
    CHECK(fs::exists(dir.path / "metrics.csv"));

    RunConfig replay = tiny("embed", dir.str() + "/replay");
    replay.checkpoint = (dir.path / "checkpoint.bin").string();
    CHECK(run(replay).exit_code == 0);
    CHECK(count_lines(dir.path / "embeddings.csv") ==
          count_lines(dir.path / "replay/embeddings.csv"));
}

TEST_CASE("embed without a checkpoint is a config error") {
    OutDir dir;
    RunResult r = run(tiny("embed", dir.str()));
    CHECK(r.exit_code == 1);
    CHECK(!r.error.empty());
}

TEST_CASE("eval-link trains on the pruned graph and reports auc") {
    OutDir dir;
    RunResult r = run(tiny("eval-link", dir.str()));
    CHECK(r.exit_code == 0);
    std::ifstream in(dir.path / "metrics.csv");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(all.find("auc") != std::string::npos);
    CHECK(all.find("ap") != std::string::npos);
}

TEST_CASE("ablation grid has fifteen combinations all containing basic") {
    OutDir dir;
    RunConfig cfg = tiny("ablate", dir.str());
    cfg.train.max_epochs = 2;
    cfg.eval.classifier_repeats = 1;
    CHECK(run(cfg).exit_code == 0);
    std::ifstream in(dir.path / "ablation.csv");
    std::string line;
    std::getline(in, line);  // header
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("basic", 0) == 0);
        ++rows;
    }
    CHECK(rows == 15);
}

TEST_CASE("a broken dataset path is a runtime failure, not a crash") {
    OutDir dir;
    RunConfig cfg = tiny("train", dir.str());
    cfg.use_sbm = false;
    cfg.dataset_dir = "/nonexistent/bundle";
    RunResult r = run(cfg);
    CHECK(r.exit_code != 0);
    CHECK(!r.error.empty());
}
