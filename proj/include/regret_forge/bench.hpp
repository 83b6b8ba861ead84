#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <regret_forge/games.hpp>
#include <regret_forge/log.hpp>
#include <regret_forge/metrics.hpp>
#include <regret_forge/solver.hpp>

namespace regret_forge {

struct ExperimentSpec {
    std::string game;
    std::string variant;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    long long iterations = 1000;
    long long eval_interval = 20;
    long long seed = 0;  // accepted for forward compatibility; runs are deterministic
    std::string out;
    int line = 0;  // first line of the stanza in its spec file
};

inline std::vector<ConvergenceRecord> run_experiment(const ExperimentSpec& spec) {
    log_info("running ", spec.game, " ", spec.variant, " T=", spec.iterations);
    ExtensiveGame game = make_game(spec.game);
    GameSdp gs = link_game(game);
    SolverConfig cfg;
    cfg.variant = parse_variant(spec.variant);
    cfg.alpha = spec.alpha;
    cfg.beta = spec.beta;
    cfg.gamma = spec.gamma;
    cfg.iterations = spec.iterations;
    cfg.eval_interval = spec.eval_interval;
    Solver solver(gs, cfg);
    return solver.solve();
}

// ---------------- CSV ----------------

inline constexpr const char* kCsvHeader = "iteration,exploitability,delta1,delta2,elapsed_ms";

// Doubles are written with %.17g so they round-trip exactly. elapsed_ms is
// zeroed unless timing is requested, keeping default outputs byte-identical
// across machines and runs.
inline void write_csv(const std::string& path, const std::vector<ConvergenceRecord>& records,
                      bool timing = false) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << kCsvHeader << "\n";
    char buf[128];
    for (const auto& r : records) {
        double ms = timing ? r.elapsed_ms : 0.0;
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g", r.iteration,
                      r.exploitability, r.delta1, r.delta2, ms);
        out << buf << "\n";
    }
    if (!out) throw std::invalid_argument("failed while writing '" + path + "'");
}

namespace detail {

inline std::invalid_argument csv_error(const std::string& path, int line,
                                       const std::string& msg) {
    return std::invalid_argument(path + ":" + std::to_string(line) + ": " + msg);
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline bool parse_ll(const std::string& s, long long& out) {
    try {
        size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

inline std::vector<ConvergenceRecord> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw detail::csv_error(path, 1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw detail::csv_error(path, 1, "expected header '" + std::string(kCsvHeader) + "'");
    }
    std::vector<ConvergenceRecord> records;
    int ln = 1;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto parts = detail::split(line, ',');
        if (parts.size() != 5) {
            throw detail::csv_error(path, ln, "expected 5 fields, got " +
                                                  std::to_string(parts.size()));
        }
        ConvergenceRecord r;
        if (!detail::parse_ll(parts[0], r.iteration)) {
            throw detail::csv_error(path, ln, "bad iteration '" + parts[0] + "'");
        }
        double* fields[4] = {&r.exploitability, &r.delta1, &r.delta2, &r.elapsed_ms};
        for (int i = 0; i < 4; ++i) {
            if (!detail::parse_double(parts[i + 1], *fields[i])) {
                throw detail::csv_error(path, ln, "bad number '" + parts[i + 1] + "'");
            }
        }
        records.push_back(r);
    }
    return records;
}

// ---------------- Grid specs ----------------
// Plain-text stanzas of key=value lines separated by blank lines; '#' starts
// a comment. Keys: game, variant, alpha, beta, gamma, iterations,
// eval_interval, seed, out. Every stanza needs game and variant; out defaults
// to a sanitized "<game>_<variant>.csv".

inline std::string sanitize_filename(const std::string& s) {
    std::string out;
    for (char c : s) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out;
}

inline std::vector<ExperimentSpec> parse_grid_specs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");

    std::vector<ExperimentSpec> specs;
    std::map<std::string, std::string> stanza;
    int stanza_line = 0;

    auto fail = [&](int ln, const std::string& msg) {
        return std::invalid_argument(path + ":" + std::to_string(ln) + ": " + msg);
    };

    auto flush = [&]() {
        if (stanza.empty()) return;
        ExperimentSpec spec;
        spec.line = stanza_line;
        auto take = [&](const char* key) -> std::optional<std::string> {
            auto it = stanza.find(key);
            if (it == stanza.end()) return std::nullopt;
            return it->second;
        };
        auto num = [&](const char* key) -> std::optional<double> {
            auto v = take(key);
            if (!v) return std::nullopt;
            double d = 0.0;
            if (!detail::parse_double(*v, d)) {
                throw fail(stanza_line, std::string("bad number for ") + key + ": '" + *v + "'");
            }
            return d;
        };
        auto integer = [&](const char* key, long long fallback) -> long long {
            auto v = take(key);
            if (!v) return fallback;
            long long n = 0;
            if (!detail::parse_ll(*v, n)) {
                throw fail(stanza_line, std::string("bad integer for ") + key + ": '" + *v + "'");
            }
            return n;
        };
        auto game = take("game");
        auto variant = take("variant");
        if (!game || !variant) {
            throw fail(stanza_line, "stanza needs both game= and variant=");
        }
        spec.game = *game;
        spec.variant = *variant;
        spec.alpha = num("alpha");
        spec.beta = num("beta");
        spec.gamma = num("gamma");
        spec.iterations = integer("iterations", 1000);
        spec.eval_interval = integer("eval_interval", 20);
        spec.seed = integer("seed", 0);
        spec.out = take("out").value_or(sanitize_filename(spec.game + "_" + spec.variant) +
                                        ".csv");
        static const char* known[] = {"game", "variant", "alpha", "beta", "gamma",
                                      "iterations", "eval_interval", "seed", "out"};
        for (const auto& [k, v] : stanza) {
            bool ok = false;
            for (const char* kk : known) {
                if (k == kk) { ok = true; break; }
            }
            if (!ok) throw fail(stanza_line, "unknown key '" + k + "'");
        }
        specs.push_back(std::move(spec));
        stanza.clear();
    };

    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) {
            flush();
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw fail(ln, "expected key=value, got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw fail(ln, "empty key");
        if (stanza.empty()) stanza_line = ln;
        if (!stanza.emplace(key, value).second) {
            throw fail(ln, "duplicate key '" + key + "' in stanza");
        }
    }
    flush();
    return specs;
}

struct GridOutcome {
    size_t total = 0;
    std::vector<std::string> errors;  // one entry per failed stanza
};

// Runs every spec, writing CSVs under out_dir. Duplicate output paths abort
// before anything runs; individual failures are collected and the remaining
// stanzas still run.
inline GridOutcome run_grid(const std::vector<ExperimentSpec>& specs, const std::string& out_dir,
                            int jobs, bool timing = false) {
    namespace fs = std::filesystem;
    GridOutcome outcome;
    outcome.total = specs.size();
    if (specs.empty()) return outcome;

    std::map<std::string, int> seen;
    for (size_t i = 0; i < specs.size(); ++i) {
        auto [it, fresh] = seen.emplace(specs[i].out, specs[i].line);
        if (!fresh) {
            throw std::invalid_argument("output '" + specs[i].out +
                                        "' used by stanzas at lines " +
                                        std::to_string(it->second) + " and " +
                                        std::to_string(specs[i].line));
        }
    }

    fs::create_directories(out_dir);
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(specs.size()));

    std::atomic<size_t> next{0};
    std::mutex mu;
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            const auto& spec = specs[i];
            try {
                auto records = run_experiment(spec);
                write_csv((fs::path(out_dir) / spec.out).string(), records, timing);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                outcome.errors.push_back("stanza at line " + std::to_string(spec.line) + " (" +
                                         spec.game + ", " + spec.variant + "): " + e.what());
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    std::sort(outcome.errors.begin(), outcome.errors.end());
    return outcome;
}

// ---------------- SVG convergence plot ----------------
// 800x600, linear iterations against log10 exploitability floored at 1e-12,
// one polyline per CSV, legend from file stems.

inline void render_plot(const std::string& out_path, const std::vector<std::string>& csv_paths) {
    if (csv_paths.empty()) throw std::invalid_argument("plot needs at least one CSV");

    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> pts;  // (iteration, floored exploitability)
    };
    std::vector<Series> series;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& path : csv_paths) {
        auto records = read_csv(path);
        if (records.empty()) {
            throw std::invalid_argument(path + ": no data rows to plot");
        }
        Series s;
        s.label = std::filesystem::path(path).stem().string();
        for (const auto& r : records) {
            double x = static_cast<double>(r.iteration);
            double y = std::max(r.exploitability, 1e-12);
            s.pts.emplace_back(x, y);
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
        series.push_back(std::move(s));
    }
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
    if (ly1 - ly0 < 1e-9) {
        ly0 -= 1;
        ly1 += 1;
    }

    const double W = 800, H = 600, ml = 80, mr = 20, mt = 20, mb = 60;
    auto xmap = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto ymap = [&](double y) {
        return mt + (ly1 - std::log10(std::max(y, 1e-12))) / (ly1 - ly0) * (H - mt - mb);
    };

    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr int n_colors = 10;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    // frame
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
        << "\" height=\"" << (H - mt - mb)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // x ticks: five evenly spaced values
    for (int i = 0; i <= 4; ++i) {
        double x = xmin + (xmax - xmin) * i / 4.0;
        double px = xmap(x);
        svg << "<line x1=\"" << px << "\" y1=\"" << (H - mb) << "\" x2=\"" << px << "\" y2=\""
            << (H - mb + 6) << "\" stroke=\"black\"/>\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", x);
        svg << "<text x=\"" << px << "\" y=\"" << (H - mb + 22)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << buf << "</text>\n";
    }
    svg << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 14)
        << "\" font-size=\"14\" text-anchor=\"middle\">iteration</text>\n";

    // y ticks: powers of ten, at most seven labels
    int e0 = static_cast<int>(std::ceil(ly0 - 1e-9));
    int e1 = static_cast<int>(std::floor(ly1 + 1e-9));
    int step = 1;
    if (e1 >= e0) step = std::max(1, (e1 - e0) / 6 + ((e1 - e0) % 6 ? 1 : 0));
    for (int e = e0; e <= e1; e += step) {
        double py = mt + (ly1 - e) / (ly1 - ly0) * (H - mt - mb);
        svg << "<line x1=\"" << (ml - 6) << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\""
            << py << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << (W - mr) << "\" y2=\""
            << py << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        svg << "<text x=\"" << (ml - 10) << "\" y=\"" << (py + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    svg << "<text x=\"18\" y=\"" << (mt + (H - mt - mb) / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << (mt + (H - mt - mb) / 2) << ")\">exploitability</text>\n";

    for (size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % n_colors];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].pts) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6g,%.6g ", xmap(x), ymap(y));
            svg << buf;
        }
        svg << "\"/>\n";
    }

    // legend
    double lx = W - mr - 240, ly = mt + 14;
    for (size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % n_colors];
        double y = ly + 18 * static_cast<double>(i);
        svg << "<line x1=\"" << lx << "\" y1=\"" << (y - 4) << "\" x2=\"" << (lx + 24)
            << "\" y2=\"" << (y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << (lx + 30) << "\" y=\"" << y << "\" font-size=\"12\">"
            << series[i].label << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write '" + out_path + "'");
    out << svg.str();
    if (!out) throw std::invalid_argument("failed while writing '" + out_path + "'");
}

}  // namespace regret_forge
