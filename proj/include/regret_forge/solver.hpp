#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <regret_forge/game.hpp>
#include <regret_forge/metrics.hpp>
#include <regret_forge/minimizers.hpp>
#include <regret_forge/sdp.hpp>

namespace regret_forge {

// Behavior strategies are stored flat over sequences: the action-a
// probability of decision node j lives at first_seq(j) + a. The dummy root
// keeps probability 1 on its single action.
inline std::vector<double> flat_uniform(const SequentialDecisionProcess& tp) {
    std::vector<double> b(tp.n_seqs, 0.0);
    for (const auto& node : tp.nodes) {
        double u = 1.0 / node.n_actions();
        for (int a = 0; a < node.n_actions(); ++a) b[node.first_seq + a] = u;
    }
    return b;
}

inline void sequence_form_from_flat(const SequentialDecisionProcess& tp,
                                    std::span<const double> behavior,
                                    std::vector<double>& out) {
    out.assign(tp.n_seqs, 0.0);
    for (const auto& node : tp.nodes) {
        double mass = node.parent_seq < 0 ? 1.0 : out[node.parent_seq];
        for (int a = 0; a < node.n_actions(); ++a) {
            out[node.first_seq + a] = mass * behavior[node.first_seq + a];
        }
    }
}

// Local losses under the current behavior: q[s] adds to the sequence loss of
// s the values of the decision nodes reached through s, where a node's value
// is its behavior-weighted local loss. One reverse sweep, children having
// larger ids than parents.
inline void counterfactual_losses(const SequentialDecisionProcess& tp,
                                  std::span<const double> behavior,
                                  std::span<const double> seq_loss, std::vector<double>& q,
                                  std::vector<double>& node_value) {
    if (static_cast<int>(seq_loss.size()) != tp.n_seqs ||
        static_cast<int>(behavior.size()) != tp.n_seqs) {
        throw std::invalid_argument("counterfactual_losses: wrong dimension");
    }
    q.assign(tp.n_seqs, 0.0);
    node_value.assign(tp.n_nodes(), 0.0);
    for (int j = tp.n_nodes() - 1; j >= 0; --j) {
        const auto& node = tp.nodes[j];
        double v = 0.0;
        for (int a = 0; a < node.n_actions(); ++a) {
            int s = node.first_seq + a;
            double c = seq_loss[s];
            for (int k : tp.seq_children[s]) c += node_value[k];
            q[s] = c;
            v += behavior[s] * c;
        }
        node_value[j] = v;
    }
}

struct SolverConfig {
    Variant variant = Variant::cfr_plus;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    long long iterations = 1000;
    long long eval_interval = 20;
    bool alternating = true;  // player 1 updates first and player 2 replies to it
    WeightFn w;    // update weights for the explicitly weighted variants, default 1
    WeightFn tau;  // averaging weights for the explicitly weighted variants, default 1
};

// Regret bounds and the regret-to-Nash identity, accumulated from the
// synchronized loss pair (A ydot^t, -A^T xdot^t) taken at the start of every
// iteration. Reading it never perturbs the solver state.
struct AuditReport {
    std::array<double, 2> weighted_regret{};  // R_tau per seat
    double played_sum = 0.0;                  // sum_t tau (<l_x, x> + <l_y, y>), 0 for zero-sum pairs
    std::array<std::vector<double>, 2> average;  // audit's own tau-weighted averages
    double value = 0.0;
    double delta1 = 0.0;  // unclamped
    double delta2 = 0.0;
    double regret_bound = 0.0;        // (R_tau,x + R_tau,y) / sum tau
    double norm_bound = 0.0;          // per-node sqrt form
    double prediction_bound = 0.0;    // per-node sqrt form against predictions
    std::array<double, 2> laminar_sum{};  // sum_j [max_a accumulated node regret]^+
};

class Solver {
public:
    Solver(const GameSdp& gs, SolverConfig cfg)
        : gs_(&gs), cfg_(std::move(cfg)), sched_(default_schedule(cfg_.variant)) {
        if (cfg_.alpha) sched_.alpha = *cfg_.alpha;
        if (cfg_.beta) sched_.beta = *cfg_.beta;
        if (cfg_.gamma) sched_.gamma = *cfg_.gamma;
        if (cfg_.eval_interval <= 0) {
            throw std::invalid_argument("eval_interval must be positive");
        }
        if (cfg_.iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
        for (int p = 0; p < 2; ++p) {
            const auto& tp = gs_->sdp[p];
            b_[p] = flat_uniform(tp);
            sequence_form_from_flat(tp, b_[p], x_[p]);
            R_[p].assign(tp.n_seqs, 0.0);
            v_[p].assign(tp.n_seqs, 0.0);
            X_[p].assign(tp.n_seqs, 0.0);
        }
    }

    const SolverConfig& config() const { return cfg_; }
    const DiscountSchedule& schedule() const { return sched_; }
    long long iterations_done() const { return t_; }
    const std::vector<double>& current_strategy(int seat) const { return x_[seat]; }
    const std::vector<double>& behavior(int seat) const { return b_[seat]; }
    const std::vector<double>& regrets(int seat) const { return R_[seat]; }

    // Audit weights (w, tau) default to the weights the configured variant
    // effectively runs with.
    void enable_audit(WeightFn w = nullptr, WeightFn tau = nullptr) {
        if (t_ != 0) throw std::invalid_argument("enable_audit before the first iteration");
        audit_enabled_ = true;
        audit_w_ = w ? std::move(w) : default_audit_w();
        audit_tau_ = tau ? std::move(tau) : default_audit_tau();
        for (int p = 0; p < 2; ++p) {
            int ns = gs_->sdp[p].n_seqs;
            aud_acc_loss_[p].assign(ns, 0.0);
            aud_node_regret_[p].assign(ns, 0.0);
            aud_prev_r_[p].assign(ns, 0.0);
            aud_avg_num_[p].assign(ns, 0.0);
            aud_node_sq_[p].assign(gs_->sdp[p].n_nodes(), 0.0);
            aud_node_sq_pred_[p].assign(gs_->sdp[p].n_nodes(), 0.0);
            aud_played_[p] = 0.0;
        }
        aud_tau_sum_ = 0.0;
        aud_tau1_ = aud_w1_ = 1.0;
    }

    void iterate() {
        int t = static_cast<int>(++t_);
        accumulate_average(t);
        if (audit_enabled_) audit_step(t);
        if (cfg_.alternating) {
            update_player(0, x_[1], t);
            update_player(1, x_[0], t);  // player 2 faces the fresh strategy
        } else {
            auto x_start = x_[0];
            update_player(0, x_[1], t);
            update_player(1, x_start, t);
        }
    }

    std::vector<double> average_strategy(int seat) const {
        if (t_ == 0) return x_[seat];
        std::vector<double> avg(X_[seat].size());
        for (size_t s = 0; s < avg.size(); ++s) avg[s] = X_[seat][s] / W_;
        return avg;
    }

    AuditReport audit_report() const {
        if (!audit_enabled_) throw std::invalid_argument("audit was not enabled");
        if (t_ == 0) throw std::invalid_argument("audit_report needs at least one iteration");
        AuditReport rep;
        for (int p = 0; p < 2; ++p) {
            rep.weighted_regret[p] =
                aud_played_[p] - best_response(gs_->sdp[p], aud_acc_loss_[p]).value;
            rep.played_sum += aud_played_[p];
            rep.average[p].resize(aud_avg_num_[p].size());
            for (size_t s = 0; s < aud_avg_num_[p].size(); ++s) {
                rep.average[p][s] = aud_avg_num_[p][s] / aud_tau_sum_;
            }
        }
        rep.value = bilinear_value(gs_->A, rep.average[0], rep.average[1]);
        double br1 = best_response(gs_->sdp[0], loss_gradient(gs_->A, rep.average[1], 0)).value;
        double br2 = best_response(gs_->sdp[1], loss_gradient(gs_->A, rep.average[0], 1)).value;
        rep.delta1 = rep.value - br1;
        rep.delta2 = -br2 - rep.value;
        rep.regret_bound = (rep.weighted_regret[0] + rep.weighted_regret[1]) / aud_tau_sum_;

        double ratio1 = aud_tau1_ / aud_w1_;
        double nb = 0.0, pb = 0.0;
        for (int p = 0; p < 2; ++p) {
            const auto& tp = gs_->sdp[p];
            for (int j = 0; j < tp.n_nodes(); ++j) {
                nb += std::sqrt(std::max(ratio1 * aud_node_sq_[p][j], 0.0));
                pb += std::sqrt(std::max(2.0 * ratio1 * aud_node_sq_pred_[p][j], 0.0));
            }
            double lam = 0.0;
            for (int j = 0; j < tp.n_nodes(); ++j) {
                const auto& node = tp.nodes[j];
                double m = 0.0;
                for (int a = 0; a < node.n_actions(); ++a) {
                    m = std::max(m, aud_node_regret_[p][node.first_seq + a]);
                }
                lam += m;
            }
            rep.laminar_sum[p] = lam;
        }
        rep.norm_bound = nb / aud_tau_sum_;
        rep.prediction_bound = pb / aud_tau_sum_;
        return rep;
    }

    std::vector<ConvergenceRecord> solve() {
        std::vector<ConvergenceRecord> records;
        auto start = std::chrono::steady_clock::now();
        for (long long t = 1; t <= cfg_.iterations; ++t) {
            iterate();
            if (t % cfg_.eval_interval == 0 || t == cfg_.iterations) {
                auto ex = exploitability(*gs_, average_strategy(0), average_strategy(1));
                double ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
                records.push_back(
                    {t, std::max(ex.e(), 1e-12), ex.delta1, ex.delta2, ms});
            }
        }
        return records;
    }

private:
    double update_weight(int t) const { return cfg_.w ? cfg_.w(t) : 1.0; }

    double avg_weight(int t) const {
        if (cfg_.variant == Variant::wcfr_plus || cfg_.variant == Variant::pwcfr_plus) {
            return cfg_.tau ? cfg_.tau(t) : 1.0;
        }
        return explicit_avg_weight(cfg_.variant, t);
    }

    WeightFn default_audit_w() const {
        Variant v = cfg_.variant;
        if (v == Variant::wcfr_plus || v == Variant::pwcfr_plus) {
            WeightFn w = cfg_.w;
            return w ? w : WeightFn([](int) { return 1.0; });
        }
        if (v == Variant::linear_cfr) {
            return [](int t) { return static_cast<double>(t); };
        }
        if (v == Variant::dcfr_plus || v == Variant::pdcfr_plus) {
            DiscountSchedule s = sched_;
            return [s](int t) { return induced_update_weight(s, t); };
        }
        return [](int) { return 1.0; };
    }

    WeightFn default_audit_tau() const {
        if (uses_avg_recursion(cfg_.variant)) {
            DiscountSchedule s = sched_;
            return [s](int t) { return induced_avg_weight(s, t); };
        }
        Variant v = cfg_.variant;
        if (v == Variant::wcfr_plus || v == Variant::pwcfr_plus) {
            WeightFn tau = cfg_.tau;
            return tau ? tau : WeightFn([](int) { return 1.0; });
        }
        return [v](int t) { return explicit_avg_weight(v, t); };
    }

    void accumulate_average(int t) {
        if (uses_avg_recursion(cfg_.variant)) {
            double d = sched_.d_avg(t);
            for (int p = 0; p < 2; ++p) {
                for (size_t s = 0; s < X_[p].size(); ++s) {
                    X_[p][s] = X_[p][s] * d + x_[p][s];
                }
            }
            W_ = W_ * d + 1.0;
        } else {
            double tau = avg_weight(t);
            for (int p = 0; p < 2; ++p) {
                for (size_t s = 0; s < X_[p].size(); ++s) X_[p][s] += tau * x_[p][s];
            }
            W_ += tau;
        }
    }

    void compute_regret(int p, const std::vector<double>& loss) {
        const auto& tp = gs_->sdp[p];
        counterfactual_losses(tp, b_[p], loss, q_buf_, val_buf_);
        r_buf_.assign(tp.n_seqs, 0.0);
        for (int j = 0; j < tp.n_nodes(); ++j) {
            const auto& node = tp.nodes[j];
            for (int a = 0; a < node.n_actions(); ++a) {
                int s = node.first_seq + a;
                r_buf_[s] = val_buf_[j] - q_buf_[s];
            }
        }
    }

    void update_player(int p, const std::vector<double>& opp_seq, int t) {
        const auto& tp = gs_->sdp[p];
        auto loss = loss_gradient(gs_->A, opp_seq, p);
        compute_regret(p, loss);
        double wt = update_weight(t);
        double wn = update_weight(t + 1);
        for (int j = 0; j < tp.n_nodes(); ++j) {
            const auto& node = tp.nodes[j];
            int na = node.n_actions();
            std::span<double> Rj(R_[p].data() + node.first_seq, na);
            std::span<const double> rj(r_buf_.data() + node.first_seq, na);
            regret_update(cfg_.variant, sched_, wt, t, Rj, rj);
        }
        v_[p] = r_buf_;  // forecast of the next regret: the one just seen
        for (int j = 0; j < tp.n_nodes(); ++j) {
            const auto& node = tp.nodes[j];
            int na = node.n_actions();
            std::span<const double> Rj(R_[p].data() + node.first_seq, na);
            std::span<const double> vj(v_[p].data() + node.first_seq, na);
            std::span<double> bj(b_[p].data() + node.first_seq, na);
            next_local_strategy(cfg_.variant, sched_, wn, t, Rj, vj, bj);
        }
        sequence_form_from_flat(tp, b_[p], x_[p]);
    }

    void audit_step(int t) {
        double at = audit_tau_(t);
        double aw = audit_w_(t);
        if (t == 1) {
            aud_tau1_ = at;
            aud_w1_ = aw;
        }
        aud_tau_sum_ += at;
        std::array<std::vector<double>, 2> L;
        L[0] = loss_gradient(gs_->A, x_[1], 0);
        L[1] = loss_gradient(gs_->A, x_[0], 1);
        for (int p = 0; p < 2; ++p) {
            const auto& tp = gs_->sdp[p];
            compute_regret(p, L[p]);
            for (int j = 0; j < tp.n_nodes(); ++j) {
                const auto& node = tp.nodes[j];
                double sq = 0.0, sqp = 0.0;
                for (int a = 0; a < node.n_actions(); ++a) {
                    int s = node.first_seq + a;
                    double r = r_buf_[s];
                    aud_node_regret_[p][s] += at * r;
                    sq += r * r;
                    double d = r - aud_prev_r_[p][s];
                    sqp += d * d;
                }
                aud_node_sq_[p][j] += at * aw * sq;
                aud_node_sq_pred_[p][j] += at * aw * sqp;
            }
            aud_prev_r_[p] = r_buf_;
            double dot = 0.0;
            for (int s = 0; s < tp.n_seqs; ++s) {
                aud_acc_loss_[p][s] += at * L[p][s];
                aud_avg_num_[p][s] += at * x_[p][s];
                dot += L[p][s] * x_[p][s];
            }
            aud_played_[p] += at * dot;
        }
    }

    const GameSdp* gs_;
    SolverConfig cfg_;
    DiscountSchedule sched_;
    long long t_ = 0;

    std::array<std::vector<double>, 2> b_, x_, R_, v_, X_;
    double W_ = 0.0;

    bool audit_enabled_ = false;
    WeightFn audit_w_, audit_tau_;
    std::array<std::vector<double>, 2> aud_acc_loss_, aud_node_regret_, aud_prev_r_, aud_avg_num_;
    std::array<std::vector<double>, 2> aud_node_sq_, aud_node_sq_pred_;
    std::array<double, 2> aud_played_{};
    double aud_tau_sum_ = 0.0, aud_tau1_ = 1.0, aud_w1_ = 1.0;

    std::vector<double> q_buf_, val_buf_, r_buf_;
};

}  // namespace regret_forge
