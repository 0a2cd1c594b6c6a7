#include "core/objective.hpp"

#include <stdexcept>

namespace mncscl {

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "cv") return LossMode::CoreView;
    if (s == "fg") return LossMode::FullGraph;
    throw std::invalid_argument("unknown loss mode: '" + s + "'");
}

std::string to_string(LossMode m) { return m == LossMode::CoreView ? "cv" : "fg"; }

namespace {

// sigma(row_i(A) W_d row_i(B)^T) for all rows at once, given T = A W_d.
Tensor pair_probs(Tape& tape, const Tensor& t, const Tensor& b) {
    return tape.sigmoid(tape.row_sums(tape.mul(t, b)));
}

Tensor log_pos(Tape& tape, const Tensor& probs) {
    return tape.sum(tape.log(tape.clamp(probs, kProbClampEps, 1.0 - kProbClampEps)));
}

Tensor log_neg(Tape& tape, const Tensor& probs) {
    // already negated: -log(1 - D)
    return tape.sum(tape.neg_log_one_minus(tape.clamp(probs, kProbClampEps, 1.0 - kProbClampEps)));
}

}  // namespace

LossResult loss_cv(Tape& tape, const PairBatch& batch, const Tensor& w_d) {
    const int k = static_cast<int>(batch.positives.size());
    if (k < 2) throw std::invalid_argument("core-view loss requires K >= 2");
    if (batch.negatives.size() != batch.positives.size())
        throw std::invalid_argument("positive/negative count mismatch");
    const long n = batch.positives[0].rows();

    Tensor t_pos = tape.matmul(batch.positives[0], w_d);   // basic, clean
    Tensor t_neg = tape.matmul(batch.negatives[0], w_d);   // basic, corrupted
    Tensor total;
    for (int j = 1; j < k; ++j) {
        Tensor pos_term = tape.scale(log_pos(tape, pair_probs(tape, t_pos, batch.positives[j])), -1.0);
        Tensor neg_term = log_neg(tape, pair_probs(tape, t_neg, batch.positives[j]));
        Tensor contrib = tape.add(pos_term, neg_term);
        total = (j == 1) ? contrib : tape.add(total, contrib);
    }
    LossResult r;
    r.term_count = 2L * n * (k - 1);
    r.loss = tape.scale(total, 1.0 / static_cast<double>(r.term_count));
    return r;
}

LossResult loss_fg(Tape& tape, const PairBatch& batch, const Tensor& w_d) {
    const int k = static_cast<int>(batch.positives.size());
    if (k < 2) throw std::invalid_argument("full-graph loss requires K >= 2");
    if (batch.negatives.size() != batch.positives.size())
        throw std::invalid_argument("positive/negative count mismatch");
    const long n = batch.positives[0].rows();

    std::vector<Tensor> t(k);
    for (int j = 0; j < k; ++j) t[j] = tape.matmul(batch.positives[j], w_d);

    Tensor total;
    bool first = true;
    auto append = [&](Tensor term) {
        total = first ? term : tape.add(total, term);
        first = false;
    };
    for (int j = 0; j < k; ++j)
        for (int l = j + 1; l < k; ++l)
            append(tape.scale(log_pos(tape, pair_probs(tape, t[j], batch.positives[l])), -1.0));
    for (int j = 0; j < k; ++j)
        append(log_neg(tape, pair_probs(tape, t[j], batch.negatives[j])));

    LossResult r;
    r.term_count = n * (static_cast<long>(k) * (k - 1) / 2 + k);
    r.loss = tape.scale(total, 1.0 / static_cast<double>(r.term_count));
    return r;
}

LossResult contrastive_loss(Tape& tape, const PairBatch& batch, const Tensor& w_d) {
    return batch.mode == LossMode::CoreView ? loss_cv(tape, batch, w_d)
                                            : loss_fg(tape, batch, w_d);
}

}  // namespace mncscl
