#pragma once

#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace mncscl {

enum class LossMode { CoreView, FullGraph };

LossMode loss_mode_from_string(const std::string& s);
std::string to_string(LossMode m);

/// Positive and negative subgraph representations for all nodes: one
/// N x F' tensor per selected subgraph kind, positives aligned with
/// negatives. Kind 0 must be the basic subgraph in core-view mode.
struct PairBatch {
    std::vector<Tensor> positives;
    std::vector<Tensor> negatives;
    LossMode mode = LossMode::CoreView;
};

struct LossResult {
    Tensor loss;          // scalar, normalized, to be minimized
    long term_count = 0;  // number of BCE terms before normalization
};

inline constexpr double kProbClampEps = 1e-7;

// Core view: basic paired with every other kind; negatives pair the
// corrupted basic representation with the clean others.
LossResult loss_cv(Tape& tape, const PairBatch& batch, const Tensor& w_d);

// Full graph: every unordered pair of kinds positive; each kind paired
// with its own negative.
LossResult loss_fg(Tape& tape, const PairBatch& batch, const Tensor& w_d);

LossResult contrastive_loss(Tape& tape, const PairBatch& batch, const Tensor& w_d);

}  // namespace mncscl
