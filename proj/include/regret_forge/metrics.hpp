#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <regret_forge/game.hpp>
#include <regret_forge/sdp.hpp>

namespace regret_forge {

struct BestResponse {
    double value = 0.0;        // minimal <loss, x> over sequence-form strategies
    std::vector<double> seq;   // a pure minimizer
};

// Bottom-up dynamic program over the decision process; children have larger
// node ids, so one reverse sweep suffices. Ties pick the lowest action index.
inline BestResponse best_response(const SequentialDecisionProcess& tp,
                                  std::span<const double> loss) {
    if (static_cast<int>(loss.size()) != tp.n_seqs) {
        throw std::invalid_argument("best_response: loss has wrong dimension");
    }
    int n = tp.n_nodes();
    std::vector<double> val(n, 0.0);
    std::vector<int> best(n, 0);
    for (int j = n - 1; j >= 0; --j) {
        const auto& node = tp.nodes[j];
        double bv = 0.0;
        int ba = 0;
        for (int a = 0; a < node.n_actions(); ++a) {
            int s = node.first_seq + a;
            double c = loss[s];
            for (int k : tp.seq_children[s]) c += val[k];
            if (a == 0 || c < bv) {
                bv = c;
                ba = a;
            }
        }
        val[j] = bv;
        best[j] = ba;
    }

    BestResponse out;
    out.value = val[0];
    out.seq.assign(tp.n_seqs, 0.0);
    for (int j = 0; j < n; ++j) {
        double mass = tp.nodes[j].parent_seq < 0 ? 1.0 : out.seq[tp.nodes[j].parent_seq];
        out.seq[tp.nodes[j].first_seq + best[j]] = mass;
    }
    return out;
}

struct Exploitability {
    double value = 0.0;   // x^T A y (player-1 loss)
    double delta1 = 0.0;  // value - min_x' x'^T A y
    double delta2 = 0.0;  // max_y' x^T A y' - value
    double e() const { return (delta1 + delta2) / 2.0; }
};

// Both strategies are sequence-form. Deltas are clamped at zero; they can
// only go negative through rounding since feasible strategies never beat a
// best response.
inline Exploitability exploitability(const GameSdp& gs, const std::vector<double>& x,
                                     const std::vector<double>& y) {
    Exploitability out;
    out.value = bilinear_value(gs.A, x, y);
    double br1 = best_response(gs.sdp[0], loss_gradient(gs.A, y, 0)).value;
    double br2_loss = best_response(gs.sdp[1], loss_gradient(gs.A, x, 1)).value;
    out.delta1 = std::max(out.value - br1, 0.0);
    out.delta2 = std::max(-br2_loss - out.value, 0.0);
    return out;
}

// Weighted external regret of a play history on one decision process:
//   sum_t tau^t <loss^t, x^t>  -  min_x' <sum_t tau^t loss^t, x'>.
inline double weighted_regret(const SequentialDecisionProcess& tp,
                              const std::vector<std::vector<double>>& losses,
                              const std::vector<std::vector<double>>& strats,
                              const std::vector<double>& taus) {
    if (losses.size() != strats.size() || losses.size() != taus.size()) {
        throw std::invalid_argument("weighted_regret: history lengths differ");
    }
    std::vector<double> acc(tp.n_seqs, 0.0);
    double played = 0.0;
    for (size_t t = 0; t < losses.size(); ++t) {
        if (static_cast<int>(losses[t].size()) != tp.n_seqs ||
            static_cast<int>(strats[t].size()) != tp.n_seqs) {
            throw std::invalid_argument("weighted_regret: wrong dimension at step " +
                                        std::to_string(t + 1));
        }
        for (int s = 0; s < tp.n_seqs; ++s) {
            acc[s] += taus[t] * losses[t][s];
            played += taus[t] * losses[t][s] * strats[t][s];
        }
    }
    return played - best_response(tp, acc).value;
}

struct ConvergenceRecord {
    long long iteration = 0;
    double exploitability = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double elapsed_ms = 0.0;
};

}  // namespace regret_forge
