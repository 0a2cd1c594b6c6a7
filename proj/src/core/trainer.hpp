#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/corruption.hpp"
#include "core/model.hpp"
#include "core/objective.hpp"

namespace mncscl {

struct Seeds {
    std::uint64_t init = 1;
    std::uint64_t shuffle = 2;
    std::uint64_t corruption = 3;
};

struct TrainConfig {
    EncoderKind encoder = EncoderKind::Gcn;
    std::vector<SubgraphKind> kinds = {SubgraphKind::Basic, SubgraphKind::Neighboring,
                                       SubgraphKind::Intimate, SubgraphKind::Communal,
                                       SubgraphKind::Full};
    LossMode loss = LossMode::CoreView;
    SubgraphHyper hyper;

    int embed_dim = 512;
    double lr = 0.001;
    int max_epochs = 2000;
    int patience = 20;
    double improve_tol = 1e-5;
    bool select_best = true;  // false: keep last-epoch weights

    double ppr_alpha = 0.15;
    CorruptionMode corruption = CorruptionMode::DiffusionPlusShuffle;
    double heat_t = 5.0;
    int heat_order = 30;
    int diffusion_topk = 128;
    bool corruption_redraw = true;

    Seeds seeds;
    std::string cache_dir;  // empty: no diffusion / index-set cache

    void validate() const;
};

struct TrainReport {
    std::vector<double> loss_trace;
    int stopped_epoch = 0;  // number of epochs actually run
    int best_epoch = -1;
    double best_loss = 0.0;
    double wall_seconds = 0.0;
    Matrix embeddings;  // N x F', from the retained parameters on the clean graph
    ModelParams params;
};

TrainReport train(const Graph& g, const TrainConfig& cfg);

/// Clean-graph encoding with fixed parameters, no tape.
Matrix embed(const Graph& g, const ModelParams& params);

void save_checkpoint(const ModelParams& params, std::uint64_t config_hash,
                     const std::string& path);
ModelParams load_checkpoint(const std::string& path, std::uint64_t* config_hash = nullptr);

}  // namespace mncscl
