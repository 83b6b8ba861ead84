#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <regret_forge/sdp.hpp>

namespace regret_forge {

enum class Variant {
    cfr,
    cfr_plus,
    linear_cfr,
    dcfr,
    dcfr_plus,
    pcfr_plus,
    pdcfr_plus,
    wcfr_plus,   // weighted regrets with explicit w(t), weighted averaging tau(t)
    pwcfr_plus,  // same plus predictions
};

using WeightFn = std::function<double(int)>;

inline Variant parse_variant(const std::string& s) {
    if (s == "cfr") return Variant::cfr;
    if (s == "cfrplus") return Variant::cfr_plus;
    if (s == "linear") return Variant::linear_cfr;
    if (s == "dcfr") return Variant::dcfr;
    if (s == "dcfrplus") return Variant::dcfr_plus;
    if (s == "pcfrplus") return Variant::pcfr_plus;
    if (s == "pdcfrplus") return Variant::pdcfr_plus;
    throw std::invalid_argument("unknown variant '" + s +
                                "'; valid variants: cfr, cfrplus, linear, dcfr, dcfrplus, "
                                "pcfrplus, pdcfrplus");
}

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::cfr: return "cfr";
        case Variant::cfr_plus: return "cfrplus";
        case Variant::linear_cfr: return "linear";
        case Variant::dcfr: return "dcfr";
        case Variant::dcfr_plus: return "dcfrplus";
        case Variant::pcfr_plus: return "pcfrplus";
        case Variant::pdcfr_plus: return "pdcfrplus";
        case Variant::wcfr_plus: return "wcfrplus";
        case Variant::pwcfr_plus: return "pwcfrplus";
    }
    return "?";
}

inline bool is_predictive(Variant v) {
    return v == Variant::pcfr_plus || v == Variant::pdcfr_plus || v == Variant::pwcfr_plus;
}

// Variants whose averages follow the ((t-1)/t)^gamma recursion rather than an
// explicit per-iteration weight.
inline bool uses_avg_recursion(Variant v) {
    return v == Variant::dcfr || v == Variant::dcfr_plus || v == Variant::pcfr_plus ||
           v == Variant::pdcfr_plus;
}

struct DiscountSchedule {
    double alpha = 1.5;
    double beta = 0.0;
    double gamma = 2.0;

    // 0^e is taken as 0 for every e so the discount at t=1 is exactly 0 (it
    // multiplies an all-zero table there, so the convention is harmless).
    static double pow0(double base, double e) { return base == 0.0 ? 0.0 : std::pow(base, e); }

    double d_reg_pos(int t) const {
        double p = pow0(static_cast<double>(t - 1), alpha);
        return p / (p + 1.0);
    }
    double d_reg_neg(int t) const {
        double p = pow0(static_cast<double>(t - 1), beta);
        return p / (p + 1.0);
    }
    // Discount the next update will apply to the regret table; used by the
    // discounted predictive strategy after t completed iterations.
    double d_pred(int t) const {
        double p = pow0(static_cast<double>(t), alpha);
        return p / (p + 1.0);
    }
    double d_avg(int t) const {
        return std::pow(static_cast<double>(t - 1) / static_cast<double>(t), gamma);
    }
};

inline DiscountSchedule default_schedule(Variant v) {
    switch (v) {
        case Variant::dcfr: return {1.5, 0.0, 2.0};
        case Variant::dcfr_plus: return {1.5, 0.0, 4.0};
        case Variant::pcfr_plus: return {1.5, 0.0, 2.0};  // alpha/beta unused
        case Variant::pdcfr_plus: return {2.3, 0.0, 5.0};
        default: return {1.5, 0.0, 2.0};
    }
}

// Per-iteration strategy weight tau(t) for the explicitly weighted variants;
// the recursion variants (see uses_avg_recursion) carry their weights inside
// the running average instead.
inline double explicit_avg_weight(Variant v, int t) {
    switch (v) {
        case Variant::cfr: return 1.0;
        case Variant::cfr_plus:
        case Variant::linear_cfr: return static_cast<double>(t);
        default: return 1.0;
    }
}

// r[a] = <loss, strategy> - loss[a]
inline std::vector<double> instantaneous_regret(std::span<const double> strategy,
                                                std::span<const double> loss) {
    if (strategy.size() != loss.size()) {
        throw std::invalid_argument("instantaneous_regret: mismatched lengths");
    }
    double v = 0.0;
    for (size_t i = 0; i < loss.size(); ++i) v += loss[i] * strategy[i];
    std::vector<double> r(loss.size());
    for (size_t i = 0; i < loss.size(); ++i) r[i] = v - loss[i];
    return r;
}

// Regret matching over the clamped table: out ~ max(R, 0), uniform when the
// positive part vanishes.
inline void rm_strategy(std::span<const double> R, std::span<double> out) {
    double sum = 0.0;
    for (size_t i = 0; i < R.size(); ++i) {
        out[i] = R[i] > 0.0 ? R[i] : 0.0;
        sum += out[i];
    }
    if (sum > 0.0) {
        for (size_t i = 0; i < R.size(); ++i) out[i] /= sum;
    } else {
        double u = 1.0 / static_cast<double>(R.size());
        for (size_t i = 0; i < R.size(); ++i) out[i] = u;
    }
}

// One regret-table update at iteration t (1-based). w_t only matters for the
// explicitly weighted variants.
inline void regret_update(Variant v, const DiscountSchedule& s, double w_t, int t,
                          std::span<double> R, std::span<const double> r) {
    switch (v) {
        case Variant::cfr:
            for (size_t i = 0; i < R.size(); ++i) R[i] += r[i];
            break;
        case Variant::cfr_plus:
        case Variant::pcfr_plus:
            for (size_t i = 0; i < R.size(); ++i) R[i] = std::max(R[i] + r[i], 0.0);
            break;
        case Variant::linear_cfr:
            for (size_t i = 0; i < R.size(); ++i) R[i] += t * r[i];
            break;
        case Variant::dcfr: {
            double dp = s.d_reg_pos(t), dn = s.d_reg_neg(t);
            for (size_t i = 0; i < R.size(); ++i) {
                R[i] = R[i] * (R[i] > 0.0 ? dp : dn) + r[i];
            }
            break;
        }
        case Variant::dcfr_plus:
        case Variant::pdcfr_plus: {
            double dp = s.d_reg_pos(t);
            for (size_t i = 0; i < R.size(); ++i) R[i] = std::max(R[i] * dp + r[i], 0.0);
            break;
        }
        case Variant::wcfr_plus:
        case Variant::pwcfr_plus:
            for (size_t i = 0; i < R.size(); ++i) R[i] = std::max(R[i] + w_t * r[i], 0.0);
            break;
    }
}

// Strategy for iteration t+1 given the table after t completed iterations and
// the prediction v_pred of the next instantaneous regret. w_next = w(t+1) for
// the explicitly weighted predictive variant.
inline void next_local_strategy(Variant v, const DiscountSchedule& s, double w_next, int t,
                                std::span<const double> R, std::span<const double> v_pred,
                                std::span<double> out) {
    switch (v) {
        case Variant::pcfr_plus:
            for (size_t i = 0; i < R.size(); ++i) out[i] = R[i] + v_pred[i];
            break;
        case Variant::pdcfr_plus: {
            double d = s.d_pred(t);
            for (size_t i = 0; i < R.size(); ++i) out[i] = R[i] * d + v_pred[i];
            break;
        }
        case Variant::pwcfr_plus:
            for (size_t i = 0; i < R.size(); ++i) out[i] = R[i] + w_next * v_pred[i];
            break;
        default:
            rm_strategy(R, out);
            return;
    }
    rm_strategy(std::span<const double>(out.data(), out.size()), out);
}

// Single-simplex regret minimizer exposing the update rules directly; the
// tree solver applies the same span-level steps over flat tables.
class RegretState {
public:
    RegretState(int n, Variant variant, DiscountSchedule sched = {}, WeightFn w = nullptr)
        : variant_(variant), sched_(sched), w_(std::move(w)), R_(n, 0.0), v_(n, 0.0) {
        if (n <= 0) throw std::invalid_argument("RegretState needs at least one action");
    }

    int size() const { return static_cast<int>(R_.size()); }
    int iterations() const { return t_; }
    const std::vector<double>& regrets() const { return R_; }
    const std::vector<double>& prediction() const { return v_; }

    // Apply the instantaneous regret of iteration t; iterations must be
    // consecutive starting at 1.
    void update(std::span<const double> r, int t) {
        if (static_cast<int>(r.size()) != size()) {
            throw std::invalid_argument("RegretState::update: wrong regret length");
        }
        if (t != t_ + 1) {
            throw std::invalid_argument("RegretState::update: iteration " + std::to_string(t) +
                                        " after " + std::to_string(t_) +
                                        "; updates must be consecutive from 1");
        }
        regret_update(variant_, sched_, weight(t), t, R_, r);
        t_ = t;
    }

    void set_prediction(std::span<const double> v) {
        if (!is_predictive(variant_)) {
            throw std::invalid_argument("set_prediction: variant " + variant_name(variant_) +
                                        " does not use predictions");
        }
        if (static_cast<int>(v.size()) != size()) {
            throw std::invalid_argument("set_prediction: wrong length");
        }
        v_.assign(v.begin(), v.end());
    }

    std::vector<double> next_strategy() const {
        std::vector<double> out(size());
        next_local_strategy(variant_, sched_, weight(t_ + 1), t_, R_, v_, out);
        return out;
    }

private:
    double weight(int t) const { return w_ ? w_(t) : 1.0; }

    Variant variant_;
    DiscountSchedule sched_;
    WeightFn w_;
    std::vector<double> R_;
    std::vector<double> v_;
    int t_ = 0;
};

// ---------------- Online mirror descent over the nonnegative orthant ----------------
// Half-squared-Euclidean regularizer: every step is a shifted clamp.

struct OmdState {
    std::vector<double> x;  // current iterate
    std::vector<double> z;  // proximal center
    double eta;

    OmdState(int n, double eta_) : x(n, 0.0), z(n, 0.0), eta(eta_) {
        if (eta_ <= 0.0) throw std::invalid_argument("OMD step size must be positive");
    }
};

inline void omd_step(OmdState& st, std::span<const double> loss) {
    for (size_t i = 0; i < st.z.size(); ++i) {
        st.z[i] = std::max(st.z[i] - st.eta * loss[i], 0.0);
        st.x[i] = st.z[i];
    }
}

inline void optimistic_omd_step(OmdState& st, std::span<const double> loss,
                                std::span<const double> pred) {
    for (size_t i = 0; i < st.z.size(); ++i) {
        st.z[i] = std::max(st.z[i] - st.eta * loss[i], 0.0);
        st.x[i] = std::max(st.z[i] - st.eta * pred[i], 0.0);
    }
}

// Simplex strategy player driven by OMD on the orthant: it converts simplex
// losses to instantaneous regrets, feeds their negation (scaled by w) to the
// orthant steps, and plays the normalized iterate. With predictions enabled
// the forecast of the next regret is the current one.
class OmdSimplexMinimizer {
public:
    OmdSimplexMinimizer(int n, double eta, bool predictive, WeightFn w = nullptr)
        : st_(n, eta), predictive_(predictive), w_(std::move(w)) {}

    std::vector<double> strategy() const {
        std::vector<double> out(st_.x.size());
        rm_strategy(st_.x, out);
        return out;
    }

    void observe(std::span<const double> loss) {
        ++t_;
        auto r = instantaneous_regret(strategy(), loss);
        double wt = w_ ? w_(t_) : 1.0;
        std::vector<double> neg(r.size());
        for (size_t i = 0; i < r.size(); ++i) neg[i] = -wt * r[i];
        if (!predictive_) {
            omd_step(st_, neg);
        } else {
            double wn = w_ ? w_(t_ + 1) : 1.0;
            std::vector<double> pred(r.size());
            for (size_t i = 0; i < r.size(); ++i) pred[i] = -wn * r[i];
            optimistic_omd_step(st_, neg, pred);
        }
    }

private:
    OmdState st_;
    bool predictive_;
    WeightFn w_;
    int t_ = 0;
};

// ---------------- Weight schedules ----------------

// Weight w(t) the t-th update effectively carries under the discounted plus
// rule: discounting past regrets by m^alpha/(m^alpha+1) at step m+1 is, after
// renormalization, the same as adding the m+1-st regret with relative weight
// prod_{m'=1}^{m} (m'^alpha + 1)/m'^alpha.
inline double induced_update_weight(const DiscountSchedule& s, int t) {
    double w = 1.0;
    for (int m = 1; m < t; ++m) {
        double p = std::pow(static_cast<double>(m), s.alpha);
        w *= (p + 1.0) / p;
    }
    return w;
}

inline double induced_avg_weight(const DiscountSchedule& s, int t) {
    return std::pow(static_cast<double>(t), s.gamma);
}

// First t in [2, T] where tau(t)/w(t) exceeds tau(t-1)/w(t-1); 0 if the ratio
// is non-increasing on the whole range.
inline int first_ratio_increase(const WeightFn& w, const WeightFn& tau, int T) {
    double prev = tau(1) / w(1);
    for (int t = 2; t <= T; ++t) {
        double cur = tau(t) / w(t);
        if (cur > prev * (1.0 + 1e-12)) return t;
        prev = cur;
    }
    return 0;
}

}  // namespace regret_forge
