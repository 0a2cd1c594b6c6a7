#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "core/trainer.hpp"

namespace mncscl {

/// Inline synthetic dataset spec, as an alternative to a bundle path.
struct SbmSpec {
    int blocks = 3;
    int per_block = 50;
    double p_in = 0.2;
    double p_out = 0.02;
    int feat_dim = 16;
    std::uint64_t seed = 7;
};

struct EvalOptions {
    int classifier_repeats = 50;
    double classifier_lr = 0.01;
    int classifier_steps = 300;
    double classifier_l2 = 1e-5;
    double link_val_frac = 0.05;
    double link_test_frac = 0.10;
    std::uint64_t seed = 1;
};

/// Everything a run needs: command, dataset, training block, outputs.
struct RunConfig {
    std::string command = "train";  // train | embed | eval-node | eval-link | ablate | gradcheck
    std::string dataset_dir;        // bundle path; empty when sbm is used
    bool use_sbm = false;
    SbmSpec sbm;
    TrainConfig train;
    EvalOptions eval;
    std::string out_dir = "out";
    std::string checkpoint;  // existing checkpoint for embed/eval commands

    void validate() const;
};

/// Strict parse: every unknown key anywhere in the tree is an error.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

/// Full echo with every default resolved; parsing the echo reproduces
/// the config exactly.
nlohmann::json config_to_json(const RunConfig& cfg);
void write_config_echo(const RunConfig& cfg, const std::string& path);

std::uint64_t config_hash(const RunConfig& cfg);

Graph load_dataset(const RunConfig& cfg);

}  // namespace mncscl
