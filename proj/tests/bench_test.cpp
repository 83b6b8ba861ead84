#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <regret_forge/bench.hpp>

using namespace regret_forge;
namespace fs = std::filesystem;

namespace {

fs::path test_dir() {
    auto dir = fs::temp_directory_path() / "regret_forge_bench_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("CSV round-trips doubles exactly") {
    auto path = (test_dir() / "roundtrip.csv").string();
    std::vector<ConvergenceRecord> records = {
        {1, 0.1, 1.0 / 3.0, 6.626980426201856e-3, 12.5},
        {20, 1e-12, 0.0, 2.2250738585072014e-308, 99.25},
        {100000, 0.055555555555555552, 1e300, -1.5, 0.125},
    };

    SECTION("timing preserved") {
        write_csv(path, records, true);
        auto back = read_csv(path);
        REQUIRE(back.size() == records.size());
        for (size_t i = 0; i < records.size(); ++i) {
            CHECK(back[i].iteration == records[i].iteration);
            CHECK(back[i].exploitability == records[i].exploitability);
            CHECK(back[i].delta1 == records[i].delta1);
            CHECK(back[i].delta2 == records[i].delta2);
            CHECK(back[i].elapsed_ms == records[i].elapsed_ms);
        }
    }

    SECTION("timing zeroed by default") {
        write_csv(path, records);
        auto back = read_csv(path);
        REQUIRE(back.size() == records.size());
        for (const auto& r : back) CHECK(r.elapsed_ms == 0.0);
    }
}

TEST_CASE("CSV reader pins errors to the line") {
    auto dir = test_dir();
    auto path = (dir / "bad.csv").string();

    REQUIRE_THROWS_WITH(read_csv((dir / "absent.csv").string()),
                        Catch::Matchers::ContainsSubstring("cannot open"));

    spit(path, "");
    REQUIRE_THROWS_WITH(read_csv(path), Catch::Matchers::ContainsSubstring(":1: empty file"));

    spit(path, "iteration,exploitability\n");
    REQUIRE_THROWS_WITH(read_csv(path), Catch::Matchers::ContainsSubstring(":1: expected header"));

    spit(path, std::string(kCsvHeader) + "\n1,2,3\n");
    REQUIRE_THROWS_WITH(read_csv(path),
                        Catch::Matchers::ContainsSubstring(":2: expected 5 fields, got 3"));

    spit(path, std::string(kCsvHeader) + "\nx,1,2,3,4\n");
    REQUIRE_THROWS_WITH(read_csv(path), Catch::Matchers::ContainsSubstring("bad iteration 'x'"));

    spit(path, std::string(kCsvHeader) + "\n1,1,2,nope,4\n");
    REQUIRE_THROWS_WITH(read_csv(path), Catch::Matchers::ContainsSubstring("bad number 'nope'"));

    // Windows line endings and trailing blank lines are tolerated.
    spit(path, std::string(kCsvHeader) + "\r\n1,0.5,0.25,0.75,0\r\n\r\n");
    auto records = read_csv(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].iteration == 1);
    CHECK(records[0].exploitability == 0.5);
}

TEST_CASE("experiments run and repeat byte for byte") {
    ExperimentSpec spec;
    spec.game = "kuhn";
    spec.variant = "cfrplus";
    spec.iterations = 10;
    spec.eval_interval = 1;

    auto records = run_experiment(spec);
    REQUIRE(records.size() == 10);
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].iteration == static_cast<long long>(i) + 1);
    }
    CHECK(records.back().exploitability < records.front().exploitability);

    auto dir = test_dir();
    write_csv((dir / "run_a.csv").string(), records);
    write_csv((dir / "run_b.csv").string(), run_experiment(spec));
    CHECK(slurp(dir / "run_a.csv") == slurp(dir / "run_b.csv"));
}

TEST_CASE("grid specs parse stanzas with defaults") {
    auto dir = test_dir();
    auto path = (dir / "grid.spec").string();
    spit(path,
         "# convergence sweep\n"
         "game = liars_dice:4\n"
         "variant = cfr\n"
         "\n"
         "\n"
         "game=nfg:3\n"
         "variant=pdcfrplus  # fast on this one\n"
         "alpha = 2.3\n"
         "iterations = 500\n"
         "eval_interval = 5\n"
         "out = custom.csv\n");

    auto specs = parse_grid_specs(path);
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].game == "liars_dice:4");
    CHECK(specs[0].variant == "cfr");
    CHECK(specs[0].iterations == 1000);
    CHECK(specs[0].eval_interval == 20);
    CHECK_FALSE(specs[0].alpha.has_value());
    CHECK(specs[0].out == "liars_dice_4_cfr.csv");
    CHECK(specs[0].line == 2);

    CHECK(specs[1].variant == "pdcfrplus");
    CHECK(specs[1].alpha == 2.3);
    CHECK(specs[1].iterations == 500);
    CHECK(specs[1].out == "custom.csv");
}

TEST_CASE("grid spec errors carry file and line") {
    auto dir = test_dir();
    auto path = (dir / "bad.spec").string();

    spit(path, "game=kuhn\ngame=leduc\nvariant=cfr\n");
    REQUIRE_THROWS_WITH(parse_grid_specs(path),
                        Catch::Matchers::ContainsSubstring("duplicate key 'game'"));

    spit(path, "game=kuhn\nvariant=cfr\ncolor=red\n");
    REQUIRE_THROWS_WITH(parse_grid_specs(path),
                        Catch::Matchers::ContainsSubstring("unknown key 'color'"));

    spit(path, "game=kuhn\n");
    REQUIRE_THROWS_WITH(parse_grid_specs(path),
                        Catch::Matchers::ContainsSubstring("needs both game= and variant="));

    spit(path, "game=kuhn\nvariant=cfr\nalpha=abc\n");
    REQUIRE_THROWS_WITH(parse_grid_specs(path),
                        Catch::Matchers::ContainsSubstring("bad number for alpha"));

    spit(path, "just words\n");
    REQUIRE_THROWS_WITH(parse_grid_specs(path),
                        Catch::Matchers::ContainsSubstring("expected key=value"));

    REQUIRE_THROWS_WITH(parse_grid_specs((dir / "missing.spec").string()),
                        Catch::Matchers::ContainsSubstring("cannot open spec file"));
}

TEST_CASE("grids run every stanza and report failures") {
    auto dir = test_dir();

    SECTION("outputs equal standalone runs") {
        std::vector<ExperimentSpec> specs(2);
        specs[0].game = "nfg:2";
        specs[0].variant = "cfr";
        specs[0].iterations = 40;
        specs[0].eval_interval = 10;
        specs[0].out = "a.csv";
        specs[0].line = 1;
        specs[1].game = "nfg:3";
        specs[1].variant = "pcfrplus";
        specs[1].iterations = 30;
        specs[1].eval_interval = 30;
        specs[1].out = "b.csv";
        specs[1].line = 5;

        auto out_dir = (dir / "grid_out").string();
        auto outcome = run_grid(specs, out_dir, 2);
        CHECK(outcome.total == 2);
        CHECK(outcome.errors.empty());

        for (const auto& spec : specs) {
            auto single = (dir / ("single_" + spec.out)).string();
            write_csv(single, run_experiment(spec));
            CHECK(slurp(fs::path(out_dir) / spec.out) == slurp(single));
        }
    }

    SECTION("duplicate outputs abort before running") {
        std::vector<ExperimentSpec> specs(2);
        specs[0].game = "nfg:2";
        specs[0].variant = "cfr";
        specs[0].out = "same.csv";
        specs[0].line = 3;
        specs[1].game = "nfg:2";
        specs[1].variant = "cfrplus";
        specs[1].out = "same.csv";
        specs[1].line = 8;
        REQUIRE_THROWS_WITH(run_grid(specs, (dir / "dup_out").string(), 1),
                            Catch::Matchers::ContainsSubstring("lines 3 and 8"));
    }

    SECTION("one failing stanza does not sink the rest") {
        std::vector<ExperimentSpec> specs(2);
        specs[0].game = "no_such_game";
        specs[0].variant = "cfr";
        specs[0].iterations = 5;
        specs[0].out = "broken.csv";
        specs[0].line = 1;
        specs[1].game = "nfg:2";
        specs[1].variant = "cfr";
        specs[1].iterations = 5;
        specs[1].eval_interval = 5;
        specs[1].out = "fine.csv";
        specs[1].line = 4;

        auto out_dir = (dir / "partial").string();
        auto outcome = run_grid(specs, out_dir, 1);
        CHECK(outcome.total == 2);
        REQUIRE(outcome.errors.size() == 1);
        CHECK_THAT(outcome.errors[0],
                   Catch::Matchers::ContainsSubstring("stanza at line 1 (no_such_game, cfr)"));
        CHECK(fs::exists(fs::path(out_dir) / "fine.csv"));
        CHECK_FALSE(fs::exists(fs::path(out_dir) / "broken.csv"));
    }

    SECTION("an empty grid is a no-op") {
        auto outcome = run_grid({}, (dir / "empty_out").string(), 4);
        CHECK(outcome.total == 0);
        CHECK(outcome.errors.empty());
    }
}

TEST_CASE("plots render one polyline per series") {
    auto dir = test_dir();
    auto csv1 = (dir / "series_one.csv").string();
    auto csv2 = (dir / "series_two.csv").string();

    std::vector<ConvergenceRecord> r1, r2;
    for (int t = 1; t <= 10; ++t) {
        r1.push_back({t * 10, std::pow(10.0, -t / 2.0), 0.0, 0.0, 0.0});
    }
    r2.push_back({10, 1e-30, 0.0, 0.0, 0.0});  // floored at the plot boundary
    r2.push_back({100, 1e-2, 0.0, 0.0, 0.0});
    write_csv(csv1, r1);
    write_csv(csv2, r2);

    auto svg_path = (dir / "plot.svg").string();
    render_plot(svg_path, {csv1, csv2});
    auto svg = slurp(svg_path);

    size_t polylines = 0, at = 0;
    while ((at = svg.find("<polyline", at)) != std::string::npos) {
        ++polylines;
        at += 1;
    }
    CHECK(polylines == 2);
    CHECK(svg.find("series_one") != std::string::npos);
    CHECK(svg.find("series_two") != std::string::npos);
    CHECK(svg.find(">iteration<") != std::string::npos);
    CHECK(svg.find(">exploitability<") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("plot errors") {
    auto dir = test_dir();
    REQUIRE_THROWS_WITH(render_plot((dir / "none.svg").string(), {}),
                        Catch::Matchers::ContainsSubstring("needs at least one CSV"));

    auto empty_csv = (dir / "empty_data.csv").string();
    write_csv(empty_csv, {});
    REQUIRE_THROWS_WITH(render_plot((dir / "none.svg").string(), {empty_csv}),
                        Catch::Matchers::ContainsSubstring("no data rows to plot"));
}

TEST_CASE("filenames are sanitized") {
    CHECK(sanitize_filename("liars_dice:4") == "liars_dice_4");
    CHECK(sanitize_filename("nfg:file=/tmp/x.txt") == "nfg_file__tmp_x_txt");
    CHECK(sanitize_filename("plain-name_7") == "plain-name_7");
}
