#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include <regret_forge/bench.hpp>
#include <regret_forge/games.hpp>
#include <regret_forge/log.hpp>

namespace rf = regret_forge;

namespace {

// Unknown game or variant names exit with 2 so scripts can tell bad requests
// from runtime failures.
int classify_exit(const std::exception& e) {
    std::string msg = e.what();
    if (msg.rfind("unknown game", 0) == 0 || msg.rfind("unknown variant", 0) == 0) return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted counterfactual regret minimization benchmark"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "run one solver and write a convergence CSV");
    std::string game, variant, out;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    long long iterations = 0, eval_interval = 20;
    bool timing = false;
    solve->add_option("--game", game, "game name, e.g. kuhn or liars_dice:4")->required();
    solve->add_option("--variant", variant,
                      "cfr, cfrplus, linear, dcfr, dcfrplus, pcfrplus, pdcfrplus")
        ->required();
    auto* opt_alpha = solve->add_option("--alpha", alpha, "positive-regret discount exponent");
    auto* opt_beta = solve->add_option("--beta", beta, "negative-regret discount exponent");
    auto* opt_gamma = solve->add_option("--gamma", gamma, "averaging weight exponent");
    solve->add_option("--iterations", iterations, "number of iterations")
        ->required()
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--eval-interval", eval_interval,
                      "iterations between exploitability measurements")
        ->check(CLI::PositiveNumber);
    solve->add_option("--out", out, "output CSV path")->required();
    solve->add_flag("--timing", timing,
                    "record wall-clock elapsed_ms (default writes zeros for reproducible files)");

    auto* grid = app.add_subcommand("grid", "run a batch of experiments from a spec file");
    std::string specs_path, out_dir;
    int jobs = 1;
    bool grid_timing = false;
    grid->add_option("--specs", specs_path, "experiment spec file")->required();
    grid->add_option("--out-dir", out_dir, "directory for the CSV outputs")->required();
    grid->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
    grid->add_flag("--timing", grid_timing, "record wall-clock elapsed_ms");

    auto* plot = app.add_subcommand("plot", "render convergence curves from CSVs into an SVG");
    std::string plot_out;
    std::vector<std::string> csvs;
    plot->add_option("--out", plot_out, "output SVG path")->required();
    plot->add_option("csvs", csvs, "input CSV files")->required();

    auto* stats = app.add_subcommand(
        "stats", "print game size counters: histories, infosets, terminals, depth, "
                 "max infoset size");
    std::string stats_game;
    stats->add_option("--game", stats_game, "game name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            rf::ExperimentSpec spec;
            spec.game = game;
            spec.variant = variant;
            if (opt_alpha->count() > 0) spec.alpha = alpha;
            if (opt_beta->count() > 0) spec.beta = beta;
            if (opt_gamma->count() > 0) spec.gamma = gamma;
            spec.iterations = iterations;
            spec.eval_interval = eval_interval;
            auto records = rf::run_experiment(spec);
            rf::write_csv(out, records, timing);
            rf::log_info("wrote ", out);
        } else if (*grid) {
            auto specs = rf::parse_grid_specs(specs_path);
            if (specs.empty()) {
                std::cerr << "warning: no experiments in '" << specs_path << "'\n";
                return 0;
            }
            auto outcome = rf::run_grid(specs, out_dir, jobs, grid_timing);
            for (const auto& e : outcome.errors) std::cerr << "error: " << e << "\n";
            std::cerr << (outcome.total - outcome.errors.size()) << "/" << outcome.total
                      << " experiments succeeded\n";
            if (!outcome.errors.empty()) return 1;
        } else if (*plot) {
            rf::render_plot(plot_out, csvs);
            rf::log_info("wrote ", plot_out);
        } else if (*stats) {
            auto g = rf::make_game(stats_game);
            std::cout << g.name << " " << g.stats.histories << " " << g.stats.infosets << " "
                      << g.stats.terminals << " " << g.stats.depth << " "
                      << g.stats.max_infoset_size << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_exit(e);
    }
    return 0;
}
