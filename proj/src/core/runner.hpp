#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/gradcheck.hpp"

namespace mncscl {

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 config error, 2 runtime failure
    std::string error;
};

/// Executes cfg.command and writes reports, embeddings, checkpoints and
/// the config echo into cfg.out_dir. Never throws.
RunResult run(const RunConfig& cfg);

/// Finite-difference coverage of every tape primitive.
std::vector<CheckedComputation> primitive_check_suite(std::uint64_t seed);

/// The full contrastive loss as a checked computation. Warm cluster
/// centers and corruption draws are frozen so the check covers exactly
/// the differentiated portion of a training step.
CheckedComputation full_loss_check(const Graph& g, const TrainConfig& cfg);

/// Primitives plus both loss modes on a small synthetic fixture; one
/// report line per check is written to `lines`.
std::vector<GradCheckReport> run_gradcheck_suite(std::vector<std::string>& lines,
                                                 double tolerance = 1e-4);

void write_matrix_csv(const Matrix& m, const std::string& path);
void write_loss_trace(const std::vector<double>& trace, const std::string& path);
void write_metrics_csv(const EvalReport& report, const std::string& path);

}  // namespace mncscl
