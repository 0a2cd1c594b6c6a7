#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mncscl/mncscl.h"

int main(int argc, char** argv) {
    CLI::App app{"Multiple node-centered subgraphs contrastive learning"};
    app.set_version_flag("--version", std::string(mncscl_version()));

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::string dataset;
    std::string checkpoint;
    std::string loss;
    std::string subgraphs;
    unsigned long long seed = 0;
    bool seed_set = false;

    app.add_option("command", command,
                   "train | embed | eval-node | eval-link | ablate | gradcheck")
        ->required();
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--dataset", dataset, "dataset bundle directory (overrides config)");
    app.add_option("--checkpoint", checkpoint, "checkpoint file (overrides config)");
    app.add_option("--loss", loss, "objective: cv or fg");
    app.add_option("--subgraphs", subgraphs, "comma-separated subgraph kinds");
    app.add_option("--seed", seed, "base seed; named seeds become seed, seed+1, seed+2");

    CLI11_PARSE(app, argc, argv);
    seed_set = app.count("--seed") > 0;

    mncscl_session* s = mncscl_session_create();
    if (!s) {
        std::fprintf(stderr, "error: out of memory\n");
        return MNCSCL_RUNTIME_ERROR;
    }

    int rc = MNCSCL_OK;
    auto step = [&](int code) {
        if (rc == MNCSCL_OK && code != MNCSCL_OK) {
            rc = code;
            std::fprintf(stderr, "error: %s\n", mncscl_last_error(s));
        }
    };

    if (!config_path.empty()) step(mncscl_load_config_file(s, config_path.c_str()));
    step(mncscl_set_command(s, command.c_str()));
    if (!out_dir.empty()) step(mncscl_set_out_dir(s, out_dir.c_str()));
    if (!dataset.empty()) step(mncscl_set_dataset(s, dataset.c_str()));
    if (!checkpoint.empty()) step(mncscl_set_checkpoint(s, checkpoint.c_str()));
    if (!loss.empty()) step(mncscl_set_loss(s, loss.c_str()));
    if (!subgraphs.empty()) step(mncscl_set_subgraphs(s, subgraphs.c_str()));
    if (seed_set) step(mncscl_set_seed(s, seed));

    if (rc == MNCSCL_OK) {
        rc = mncscl_run(s);
        if (rc != MNCSCL_OK) std::fprintf(stderr, "error: %s\n", mncscl_last_error(s));
    }

    mncscl_session_destroy(s);
    return rc;
}
