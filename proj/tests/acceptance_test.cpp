// Acceptance gate for the solver library: each numbered criterion prints one
// [PASS]/[FAIL] line with its pinned tolerance and wall time. The process
// exits with the number of failed criteria, so a red gate fails ctest.
//
// Known red: the discounted-plus convergence band on nfg:3 (criterion 8b)
// does not reach 1e-4 by iteration 500 under the update rule as defined
// here; the measured value is printed and the README discusses it.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <regret_forge/bench.hpp>
#include <regret_forge/game.hpp>
#include <regret_forge/games.hpp>
#include <regret_forge/metrics.hpp>
#include <regret_forge/minimizers.hpp>
#include <regret_forge/solver.hpp>

using namespace regret_forge;
namespace fs = std::filesystem;

namespace {

// Long-run average game value of Kuhn poker as a player-1 loss.
constexpr double kKuhnGameValueLoss = 1.0 / 18.0;

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(const std::string& label, bool ok, const std::string& detail, double secs) {
    std::printf("[%s] %s - %s [%.2fs]\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void subline(const std::string& label, bool ok, const std::string& detail) {
    std::printf("       %s %s - %s\n", ok ? "[ok]" : "[FAIL]", label.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

const std::vector<std::string> kAllGames = {
    "kuhn",        "leduc",           "liars_dice:4", "liars_dice:5",
    "goofspiel:4", "goofspiel:5",     "goofspiel_imp:4", "goofspiel_imp:5",
    "battleship:2", "battleship:3",   "nfg:2",        "nfg:3"};

std::vector<std::vector<double>> random_behavior(const ExtensiveGame& g, int seat,
                                                 std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> behavior(g.n_infosets(seat));
    for (int i = 0; i < g.n_infosets(seat); ++i) {
        size_t na = g.infoset_actions[seat][i].size();
        behavior[i].resize(na);
        double sum = 0.0;
        for (size_t a = 0; a < na; ++a) {
            behavior[i][a] = u(rng) + 1e-3;
            sum += behavior[i][a];
        }
        for (auto& p : behavior[i]) p /= sum;
    }
    return behavior;
}

std::vector<double> sequence_form_of(const GameSdp& gs, int seat,
                                     const std::vector<std::vector<double>>& behavior) {
    const auto& tp = gs.sdp[seat];
    std::vector<std::vector<double>> locals(tp.n_nodes());
    locals[0] = {1.0};
    for (size_t i = 0; i < behavior.size(); ++i) {
        locals[gs.node_of_infoset[seat][i]] = behavior[i];
    }
    return tp.build_sequence_form(locals);
}

double final_exploitability(const std::string& game, Variant v, long long T) {
    auto gs = link_game(make_game(game));
    SolverConfig cfg;
    cfg.variant = v;
    cfg.iterations = T;
    cfg.eval_interval = T;
    Solver solver(gs, cfg);
    return solver.solve().back().exploitability;
}

// ---- criterion 1 ----
void criterion_sizes() {
    Timer timer;
    struct Row {
        const char* game;
        long long h, i, t;
        int d;
        long long m;
    };
    const Row rows[] = {
        {"kuhn", 58, 12, 30, 6, 2},
        {"leduc", 9457, 936, 5520, 12, 5},
        {"liars_dice:4", 8181, 1024, 4080, 12, 4},
        {"liars_dice:5", 51181, 5120, 25575, 14, 5},
        {"goofspiel:4", 1077, 270, 576, 7, 8},
        {"goofspiel:5", 26931, 3252, 14400, 9, 48},
        {"goofspiel_imp:4", 1077, 162, 576, 7, 14},
        {"goofspiel_imp:5", 26931, 2124, 14400, 9, 46},
        {"battleship:2", 10069, 3286, 5568, 9, 4},
        {"battleship:3", 732607, 81027, 552132, 9, 7},
        {"nfg:2", 7, 2, 4, 3, 2},
        {"nfg:3", 13, 2, 9, 3, 3},
    };
    bool ok = true;
    std::string bad;
    for (const auto& row : rows) {
        auto s = game_stats(make_game(row.game));
        if (s.histories != row.h || s.infosets != row.i || s.terminals != row.t ||
            s.depth != row.d || s.max_infoset_size != row.m) {
            ok = false;
            bad += std::string(" ") + row.game;
        }
    }
    double secs = timer.secs();
    if (secs >= 60.0) ok = false;
    report("criterion 1: reference game sizes", ok,
           ok ? "12 games, 5 fields each, zero tolerance" : ("mismatch on" + bad), secs);
}

// ---- criterion 2 ----
void criterion_payoffs() {
    Timer timer;
    bool ok = true;
    std::string detail;

    auto kuhn = link_game(make_game("kuhn"));
    const std::map<std::pair<int, int>, double> expected = {
        {{1, 5}, 1},   {{1, 9}, 1},    {{2, 7}, -1},  {{2, 8}, 2},   {{2, 11}, -1},
        {{2, 12}, 2},  {{3, 1}, -1},   {{3, 9}, 1},   {{4, 3}, -1},  {{4, 4}, -2},
        {{4, 11}, -1}, {{4, 12}, 2},   {{5, 1}, -1},  {{5, 5}, -1},  {{6, 3}, -1},
        {{6, 4}, -2},  {{6, 7}, -1},   {{6, 8}, -2},  {{7, 6}, 1},   {{7, 10}, 1},
        {{8, 6}, 2},   {{8, 10}, 2},   {{9, 2}, 1},   {{9, 10}, 1},  {{10, 2}, -2},
        {{10, 10}, 2}, {{11, 2}, 1},   {{11, 6}, 1},  {{12, 2}, -2}, {{12, 6}, -2},
    };
    if (kuhn.A.entries.size() != expected.size() || kuhn.A.n1 != 13 || kuhn.A.n2 != 13) {
        ok = false;
        detail = "kuhn matrix shape off";
    }
    for (const auto& e : kuhn.A.entries) {
        auto it = expected.find({e.s1, e.s2});
        if (it == expected.end() || std::abs(e.v - it->second / 6.0) > 1e-12) {
            ok = false;
            detail = "kuhn entry (" + std::to_string(e.s1) + "," + std::to_string(e.s2) + ") off";
            break;
        }
    }

    double worst = 0.0;
    std::mt19937 rng(20240815);
    for (const auto& name : kAllGames) {
        auto g = make_game(name);
        auto gs = link_game(g);
        for (int trial = 0; trial < 20; ++trial) {
            auto b0 = random_behavior(g, 0, rng);
            auto b1 = random_behavior(g, 1, rng);
            double via_matrix =
                bilinear_value(gs.A, sequence_form_of(gs, 0, b0), sequence_form_of(gs, 1, b1));
            double via_tree = expected_loss_tree(g, b0, b1);
            double diff = std::abs(via_matrix - via_tree);
            worst = std::max(worst, diff);
            if (diff > 1e-12) {
                ok = false;
                if (detail.empty()) detail = name + " bilinear gap " + fmt("%.3g", diff);
            }
        }
    }
    if (ok) {
        detail = "known entries exact to 1e-12; bilinear gap <= " + fmt("%.2e", worst) +
                 " over 20 random profiles x 12 games (tol 1e-12)";
    }
    report("criterion 2: payoff matrices", ok, detail, timer.secs());
}

// ---- criterion 3 ----
void criterion_first_iteration() {
    Timer timer;
    auto gs = link_game(make_game("nfg:3"));
    SolverConfig cfg;
    cfg.variant = Variant::pcfr_plus;
    Solver solver(gs, cfg);
    solver.iterate();
    const double tol = 1e-12;
    bool ok = std::abs(solver.regrets(0)[3] - 64.0 / 3.0) <= tol &&
              std::abs(solver.regrets(0)[1]) <= tol && std::abs(solver.regrets(0)[2]) <= tol &&
              std::abs(solver.regrets(1)[1] - 100.0 / 3.0) <= tol &&
              std::abs(solver.regrets(1)[2] - 100.0 / 3.0) <= tol &&
              std::abs(solver.regrets(1)[3]) <= tol;
    report("criterion 3: first-iteration regret trace on nfg:3", ok,
           "alternating reply tables (0,0,64/3) and (100/3,100/3,0), tol 1e-12", timer.secs());
}

// ---- criterion 4 ----
void criterion_omd_equivalence() {
    Timer timer;
    const double tol = 1e-9;
    const double etas[] = {0.1, 1.0, 10.0};
    const WeightFn weight_menu[] = {nullptr, [](int t) { return static_cast<double>(t); },
                                    [](int t) { return 0.5 + 0.5 * t; }};
    double worst = 0.0;
    int bad_streams = 0;
    for (int stream = 0; stream < 100; ++stream) {
        std::mt19937 rng(1000 + stream);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        int n = 2 + stream % 4;
        double eta = etas[stream % 3];
        bool predictive = (stream / 3) % 2 != 0;
        const WeightFn& w = weight_menu[(stream / 6) % 3];
        OmdSimplexMinimizer omd(n, eta, predictive, w);
        RegretState table(n, predictive ? Variant::pwcfr_plus : Variant::wcfr_plus, {}, w);
        bool stream_ok = true;
        for (int t = 1; t <= 100; ++t) {
            auto s_omd = omd.strategy();
            auto s_tab = table.next_strategy();
            for (int i = 0; i < n; ++i) {
                double diff = std::abs(s_omd[i] - s_tab[i]);
                worst = std::max(worst, diff);
                if (diff > tol) stream_ok = false;
            }
            std::vector<double> loss(n);
            for (auto& v : loss) v = u(rng);
            omd.observe(loss);
            auto r = instantaneous_regret(s_tab, loss);
            table.update(r, t);
            if (predictive) table.set_prediction(r);
        }
        if (!stream_ok) ++bad_streams;
    }
    bool ok = bad_streams == 0;
    report("criterion 4: orthant mirror descent equals the weighted tables", ok,
           "100 streams, n<=5, T=100, eta in {0.1,1,10}, max gap " + fmt("%.2e", worst) +
               " (tol 1e-9)" + (ok ? "" : ", " + std::to_string(bad_streams) + " streams off"),
           timer.secs());
}

// ---- criterion 5 ----
void criterion_regret_identity() {
    Timer timer;
    const double tol = 1e-9;
    double worst = 0.0;
    bool ok = true;
    for (const std::string game : {"kuhn", "nfg:3"}) {
        for (Variant v : {Variant::cfr_plus, Variant::pdcfr_plus}) {
            auto gs = link_game(make_game(game));
            SolverConfig cfg;
            cfg.variant = v;
            Solver solver(gs, cfg);
            solver.enable_audit();
            for (int t = 1; t <= 200; ++t) {
                solver.iterate();
                auto rep = solver.audit_report();
                double diff = std::abs(rep.regret_bound - (rep.delta1 + rep.delta2));
                worst = std::max(worst, diff);
                if (diff > tol) ok = false;
            }
        }
    }
    report("criterion 5: normalized regret sum equals the saddle gap", ok,
           "kuhn and nfg:3 x plus/discounted-predictive, every t <= 200, max gap " +
               fmt("%.2e", worst) + " (tol 1e-9)",
           timer.secs());
}

// ---- criterion 6 ----
void criterion_norm_bounds() {
    Timer timer;
    struct Sched {
        const char* name;
        WeightFn w, tau;
    };
    const Sched schedules[] = {
        {"w=1,tau=1", [](int) { return 1.0; }, [](int) { return 1.0; }},
        {"w=t,tau=t", [](int t) { return static_cast<double>(t); },
         [](int t) { return static_cast<double>(t); }},
        {"w=t^2,tau=t", [](int t) { return static_cast<double>(t) * t; },
         [](int t) { return static_cast<double>(t); }},
    };
    bool ok = true;
    std::string bad;
    double worst_ratio = 0.0;
    auto gs = link_game(make_game("kuhn"));
    for (const auto& sched : schedules) {
        if (first_ratio_increase(sched.w, sched.tau, 1000000) != 0) {
            ok = false;
            bad += std::string(" non-monotone:") + sched.name;
            continue;
        }
        for (bool predictive : {false, true}) {
            SolverConfig cfg;
            cfg.variant = predictive ? Variant::pwcfr_plus : Variant::wcfr_plus;
            cfg.alternating = false;
            cfg.w = sched.w;
            cfg.tau = sched.tau;
            Solver solver(gs, cfg);
            solver.enable_audit();
            for (int t = 1; t <= 500; ++t) {
                solver.iterate();
                auto rep = solver.audit_report();
                double gap = rep.delta1 + rep.delta2;
                double bound = predictive ? rep.prediction_bound : rep.norm_bound;
                worst_ratio = std::max(worst_ratio, gap / bound);
                if (gap > bound * (1.0 + 1e-9) + 1e-9) {
                    ok = false;
                    bad += std::string(" exceeded:") + sched.name +
                           (predictive ? "(pred)" : "") + "@t=" + std::to_string(t);
                }
            }
        }
    }
    report("criterion 6: weighted norm bounds along compliant schedules", ok,
           ok ? "kuhn T=500, three schedules, plain and predictive; tightest gap/bound " +
                    fmt("%.3f", worst_ratio)
              : bad,
           timer.secs());
}

// ---- criterion 7 ----
void criterion_rate_bound() {
    Timer timer;
    auto g = make_game("kuhn");
    auto gs = link_game(g);
    double range = g.stats.loss_range;
    double sets = static_cast<double>(g.n_infosets(0) + g.n_infosets(1));
    double actions = std::sqrt(static_cast<double>(g.action_label_union()));
    bool ok = true;
    std::string detail = "bound " + fmt("%.4g", range * sets * actions) + "/sqrt(T):";
    for (long long T : {10, 100, 1000}) {
        double e = final_exploitability("kuhn", Variant::cfr, T);
        double bound = range * sets * actions / std::sqrt(static_cast<double>(T));
        detail += " T=" + std::to_string(T) + " e=" + fmt("%.2e", e);
        if (e > bound) {
            ok = false;
            detail += "(>bound " + fmt("%.2e", bound) + ")";
        }
    }
    report("criterion 7: uniform-weight convergence rate", ok, detail, timer.secs());
}

// ---- criterion 8 ----
void criterion_bands() {
    Timer timer;
    bool ok = true;
    int thresholds_checked = 0;

    auto band = [&](const std::string& label, const std::string& game, Variant v, long long T,
                    double threshold, bool want_below, const std::string& note = "") {
        Timer bt;
        double e = final_exploitability(game, v, T);
        double secs = bt.secs();
        bool below = e < threshold;
        bool pass = (below == want_below) && secs < 10.0;
        ++thresholds_checked;
        if (!pass) ok = false;
        subline(label, pass,
                "e=" + fmt("%.3e", e) + (want_below ? ", want < " : ", want >= ") +
                    fmt("%.0e", threshold) + " at T=" + std::to_string(T) + ", " +
                    fmt("%.2f", secs) + "s" + (pass || note.empty() ? "" : "; " + note));
        return e;
    };

    band("plus rule on kuhn", "kuhn", Variant::cfr_plus, 1000, 1e-3, true);
    band("discounted plus on nfg:3", "nfg:3", Variant::dcfr_plus, 500, 1e-4, true,
         "out of reach for this update rule as defined; see README");
    band("discounted predictive plus on nfg:3", "nfg:3", Variant::pdcfr_plus, 500, 1e-4, true);
    band("plain predictive plus on nfg:3 stays above", "nfg:3", Variant::pcfr_plus, 500, 1e-4,
         false);

    Timer ct;
    double e_pd = final_exploitability("nfg:3", Variant::pdcfr_plus, 2000);
    double e_pc = final_exploitability("nfg:3", Variant::pcfr_plus, 2000);
    bool cmp = e_pd < e_pc && ct.secs() < 10.0;
    if (!cmp) ok = false;
    subline("discounted predictive beats plain predictive at T=2000", cmp,
            "e=" + fmt("%.3e", e_pd) + " vs " + fmt("%.3e", e_pc));

    report("criterion 8: convergence bands", ok,
           std::to_string(thresholds_checked + 1) +
               " bands, 10s budget each" +
               (ok ? "" : "; the discounted plus band is a known red, see README"),
           timer.secs());
}

// ---- criterion 9 ----
void criterion_long_run_value() {
    Timer timer;
    double values[2];
    int idx = 0;
    for (Variant v : {Variant::cfr_plus, Variant::pdcfr_plus}) {
        auto gs = link_game(make_game("kuhn"));
        SolverConfig cfg;
        cfg.variant = v;
        cfg.iterations = 100000;
        cfg.eval_interval = 100000;
        Solver solver(gs, cfg);
        solver.solve();
        values[idx++] =
            exploitability(gs, solver.average_strategy(0), solver.average_strategy(1)).value;
    }
    const double tol = 1e-6;
    double secs = timer.secs();
    bool ok = std::abs(values[0] - values[1]) <= tol &&
              std::abs(values[0] - kKuhnGameValueLoss) <= tol &&
              std::abs(values[1] - kKuhnGameValueLoss) <= tol && secs < 300.0;
    report("criterion 9: long-run kuhn values agree", ok,
           "T=100000: " + fmt("%.9f", values[0]) + " and " + fmt("%.9f", values[1]) +
               " vs recorded " + fmt("%.9f", kKuhnGameValueLoss) + " (tol 1e-6, 5min budget)",
           secs);
}

// ---- criterion 10 ----
void criterion_reproducible_csv() {
    Timer timer;
    auto dir = fs::temp_directory_path() / "regret_forge_acceptance";
    fs::create_directories(dir);
    bool ok = true;
    std::string detail = "reruns byte-identical:";
    for (const auto& [game, variant] :
         std::vector<std::pair<std::string, std::string>>{{"kuhn", "cfrplus"},
                                                          {"nfg:3", "pdcfrplus"}}) {
        ExperimentSpec spec;
        spec.game = game;
        spec.variant = variant;
        spec.iterations = 200;
        spec.eval_interval = 20;
        auto a = (dir / (sanitize_filename(game + "_" + variant) + "_a.csv")).string();
        auto b = (dir / (sanitize_filename(game + "_" + variant) + "_b.csv")).string();
        write_csv(a, run_experiment(spec));
        write_csv(b, run_experiment(spec));
        std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        bool same = !sa.empty() && sa == sb;
        if (!same) ok = false;
        detail += " " + game + "/" + variant + (same ? " yes" : " NO");
    }
    report("criterion 10: deterministic CSV output", ok, detail, timer.secs());
}

// ---- criterion 11 ----
void criterion_full_grid() {
    Timer timer;
    bool ok = true;
    std::string detail;
    std::string spec_path = std::string(RF_SOURCE_DIR) + "/experiments/full_grid.spec";
    try {
        auto specs = parse_grid_specs(spec_path);
        std::set<std::pair<std::string, std::string>> combos;
        std::set<std::string> outs;
        for (const auto& s : specs) {
            combos.insert({s.game, s.variant});
            outs.insert(s.out);
            if (s.iterations != 20000) ok = false;
        }
        if (specs.size() != 84 || combos.size() != 84 || outs.size() != 84) ok = false;
        const std::vector<std::string> variants = {"cfr",      "cfrplus",  "linear",   "dcfr",
                                                   "dcfrplus", "pcfrplus", "pdcfrplus"};
        for (const auto& g : kAllGames) {
            for (const auto& v : variants) {
                if (!combos.count({g, v})) ok = false;
            }
        }

        // Smoke run: a two-stanza grid plus a plot from its outputs.
        auto dir = fs::temp_directory_path() / "regret_forge_grid_smoke";
        fs::remove_all(dir);
        std::vector<ExperimentSpec> smoke(2);
        smoke[0].game = "nfg:2";
        smoke[0].variant = "cfr";
        smoke[0].iterations = 60;
        smoke[0].out = "nfg_2_cfr.csv";
        smoke[0].line = 1;
        smoke[1].game = "nfg:2";
        smoke[1].variant = "cfrplus";
        smoke[1].iterations = 60;
        smoke[1].out = "nfg_2_cfrplus.csv";
        smoke[1].line = 4;
        auto outcome = run_grid(smoke, dir.string(), 2);
        if (!outcome.errors.empty()) ok = false;
        auto svg = dir / "smoke.svg";
        render_plot(svg.string(), {(dir / smoke[0].out).string(), (dir / smoke[1].out).string()});
        if (!fs::exists(svg) || fs::file_size(svg) == 0) ok = false;
        detail = "84 stanzas (12 games x 7 variants, T=20000), unique outputs; smoke grid and "
                 "plot ran";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report("criterion 11: full experiment grid", ok, detail, timer.secs());
    std::printf("       reproduce with: regret_forge grid --specs experiments/full_grid.spec "
                "--out-dir grid_results --jobs 8\n");
    std::printf("       then: regret_forge plot --out grid.svg grid_results/*.csv\n");
    std::fflush(stdout);
}

}  // namespace

int main() {
    Timer total;
    std::printf("acceptance suite: solver library gate\n");
    std::fflush(stdout);

    struct Criterion {
        void (*run)();
        const char* name;
    };
    const Criterion criteria[] = {
        {criterion_sizes, "criterion 1"},
        {criterion_payoffs, "criterion 2"},
        {criterion_first_iteration, "criterion 3"},
        {criterion_omd_equivalence, "criterion 4"},
        {criterion_regret_identity, "criterion 5"},
        {criterion_norm_bounds, "criterion 6"},
        {criterion_rate_bound, "criterion 7"},
        {criterion_bands, "criterion 8"},
        {criterion_long_run_value, "criterion 9"},
        {criterion_reproducible_csv, "criterion 10"},
        {criterion_full_grid, "criterion 11"},
    };
    for (const auto& c : criteria) {
        try {
            c.run();
        } catch (const std::exception& e) {
            report(c.name, false, std::string("exception: ") + e.what(), 0.0);
        }
    }

    std::printf("%d of 11 criteria passed in %.1fs\n", 11 - g_failures, total.secs());
    return g_failures;
}
