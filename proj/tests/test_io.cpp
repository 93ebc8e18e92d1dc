#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aspp/commands.hpp"
#include "aspp/config.hpp"
#include "aspp/csv.hpp"
#include "aspp/errors.hpp"
#include "aspp/rng.hpp"

using namespace aspp;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("aspp_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

const std::string kSmallConfig =
    "# desk-scale smoke configuration\n"
    "[population]\n"
    "n_agents = 60\n"
    "mean_ln_greed = 1.2\n"
    "mean_ln_fear = 1.04\n"
    "var_ln_greed = 1.7e-4\n"
    "var_ln_fear = 1.7e-4\n"
    "trait_correlation = -1, 0.5\n"
    "\n"
    "[init]\n"
    "initial_cash = 10\n"
    "initial_target_ratio = 1\n"
    "noise_amplitude = 0.1\n"
    "initial_price = 1\n"
    "\n"
    "[simulation]\n"
    "active_per_session = 4\n"
    "sessions = 60\n"
    "rule = multiplicative\n"
    "n_paths = 6\n"
    "master_seed = 77\n"
    "wealth_bins = 10\n";

}  // namespace

TEST_CASE("doubles round-trip through the CSV formatter") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e-7, 0.0, -1.0,
                     3.141592653589793}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK_THROWS_AS(parse_double("1.2x"), Error);
}

TEST_CASE("iso dates parse and format") {
    const auto day = parse_iso_date("2021-03-31");
    CHECK(iso_date(day) == "2021-03-31");
    CHECK_THROWS_AS(parse_iso_date("2021-02-30"), Error);
    CHECK_THROWS_AS(parse_iso_date("21-02-03"), Error);
    CHECK_THROWS_AS(parse_iso_date("2021/02/03"), Error);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("price csv loads valid rows") {
    const auto dir = temp_dir("csv_ok");
    std::string content = "Date,Open,Close\n";
    for (int d = 1; d <= 10; ++d) {
        content += "2020-01-" + std::string(d < 10 ? "0" : "") + std::to_string(d) + ",1.0," +
                   std::to_string(100 + d) + "\n";
    }
    const auto result = load_price_csv(write_file(dir, "prices.csv", content));
    CHECK(result.series.closes.size() == 10);
    CHECK(result.skipped_rows == 0);
    CHECK(result.series.closes.front() == 101.0);
}

TEST_CASE("null and empty closes are skipped with a count") {
    const auto dir = temp_dir("csv_null");
    const std::string content =
        "Date,Close\n"
        "2020-01-01,100\n"
        "2020-01-02,null\n"
        "2020-01-03,101\n"
        "2020-01-04,\n"
        "2020-01-05,102\n";
    const auto result = load_price_csv(write_file(dir, "prices.csv", content));
    CHECK(result.series.closes.size() == 3);
    CHECK(result.skipped_rows == 2);
}

TEST_CASE("non-positive closes are an error with the line number") {
    const auto dir = temp_dir("csv_neg");
    const std::string content =
        "Date,Close\n"
        "2020-01-01,100\n"
        "2020-01-02,-3.0\n";
    try {
        load_price_csv(write_file(dir, "prices.csv", content));
        FAIL("expected NonPositivePriceError");
    } catch (const NonPositivePriceError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("missing columns and bad dates are reported") {
    const auto dir = temp_dir("csv_bad");
    CHECK_THROWS_AS(
        load_price_csv(write_file(dir, "no_close.csv", "Date,Volume\n2020-01-01,5\n")),
        MissingColumnError);
    CHECK_THROWS_AS(
        load_price_csv(write_file(dir, "bad_date.csv", "Date,Close\n01/02/2020,5\n")),
        UnparsableDateError);
    CHECK_THROWS_AS(load_price_csv(write_file(dir, "dup.csv",
                                              "Date,Close\n2020-01-01,5\n2020-01-01,6\n")),
                    CsvError);
    CHECK_THROWS_AS(load_price_csv(write_file(dir, "few.csv", "Date,Close\n2020-01-01,5\n"),
                                   "Date", "Close", 9),
                    TooFewRowsError);
}

TEST_CASE("rows are sorted by date and extra columns ignored") {
    const auto dir = temp_dir("csv_sort");
    const std::string content =
        "Date,Close,AdjClose\n"
        "2020-01-03,103,0\n"
        "2020-01-01,101,0\n"
        "2020-01-02,102,0\n";
    const auto result = load_price_csv(write_file(dir, "prices.csv", content));
    CHECK(result.series.closes == std::vector<double>{101.0, 102.0, 103.0});
}

TEST_CASE("config text parses, validates, and accepts overrides") {
    SweepConfig cfg = parse_config_text(kSmallConfig, "test");
    CHECK(cfg.base.population.n_agents == 60);
    CHECK(cfg.base.master_seed == 77);
    CHECK(cfg.trait_correlations == std::vector<double>{-1.0, 0.5});
    validate(cfg);

    apply_override(cfg, "simulation.n_paths", "9");
    CHECK(cfg.base.n_paths == 9);
    apply_override(cfg, "simulation.rule", "proportional");
    CHECK(cfg.base.rule.kind == UpdateRule::Kind::Proportional);

    CHECK_THROWS_AS(apply_override(cfg, "simulation.bogus", "1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "n_paths", "1"), ConfigError);
}

TEST_CASE("config validation failures carry field paths") {
    SweepConfig cfg = parse_config_text(kSmallConfig, "test");
    apply_override(cfg, "simulation.n_paths", "0");
    CHECK_THROWS_WITH_AS(validate(cfg), "simulation.n_paths: must be >= 1", ConfigError);

    CHECK_THROWS_AS(parse_config_text("[population]\nn_agents = -5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n_agents = 5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[population]\nn_agents 5\n", "t"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[nowhere]\nx = 5\n", "t"), ConfigError);
}

TEST_CASE("simulate writes the documented files and a reproducible manifest") {
    const auto dir = temp_dir("cmd_sim");
    const auto config = write_file(dir, "run.conf", kSmallConfig);

    SimulateArgs args;
    args.config_file = config;
    args.out_dir = dir / "out";
    args.workers = 2;
    std::ostringstream warnings;
    cmd_simulate(args, warnings);

    for (const char* name :
         {"price_stats_r_-1.csv", "price_stats_r_0.5.csv", "wealth_hist_r_-1.csv",
          "wealth_hist_r_0.5.csv", "trait_corr.csv", "manifest.json"}) {
        CHECK(fs::exists(args.out_dir / name));
    }

    const auto manifest = nlohmann::json::parse(read_file(args.out_dir / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["master_seed"] == 77);
    CHECK(manifest["aborted_paths"] == 0);

    // Checksums in the manifest match the bytes on disk.
    for (const auto& [name, sum] : manifest["outputs"].items()) {
        char hex[32];
        std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                      static_cast<unsigned long long>(fnv1a64(read_file(args.out_dir / name))));
        CHECK(sum.get<std::string>() == hex);
    }

    // price_stats has a header plus sessions+1 rows.
    const std::string stats = read_file(args.out_dir / "price_stats_r_-1.csv");
    CHECK(std::count(stats.begin(), stats.end(), '\n') == 62);

    // Re-running into a fresh directory reproduces the bytes.
    SimulateArgs again = args;
    again.out_dir = dir / "out2";
    again.workers = 7;
    std::ostringstream sink;
    cmd_simulate(again, sink);
    CHECK(read_file(args.out_dir / "manifest.json") == read_file(again.out_dir / "manifest.json"));
    CHECK(read_file(args.out_dir / "price_stats_r_0.5.csv") ==
          read_file(again.out_dir / "price_stats_r_0.5.csv"));
}

TEST_CASE("simulate rejects invalid overrides with exit-worthy errors") {
    const auto dir = temp_dir("cmd_sim_bad");
    const auto config = write_file(dir, "run.conf", kSmallConfig);
    SimulateArgs args;
    args.config_file = config;
    args.out_dir = dir / "out";
    args.overrides = {{"simulation.n_paths", "0"}};
    std::ostringstream warnings;
    CHECK_THROWS_AS(cmd_simulate(args, warnings), ConfigError);
}

TEST_CASE("estimate writes one row per window and gamma") {
    const auto dir = temp_dir("cmd_est");
    std::string content = "Date,Close\n";
    double price = 100.0;
    Rng rng(3);
    auto day = parse_iso_date("2015-01-01");
    for (int i = 0; i < 200; ++i) {
        content += iso_date(day) + "," + format_double(price) + "\n";
        day += std::chrono::days(1);
        price *= std::exp(0.0005 + 0.02 * standard_normal(rng));
    }
    EstimateArgs args;
    args.prices_csv = write_file(dir, "prices.csv", content);
    args.out_dir = dir / "out";
    args.windows = {7, 14};
    args.gamma_grid = {20.0, 120.0, 220.0};
    std::ostringstream warnings;
    cmd_estimate(args, warnings);

    const std::string csv = read_file(args.out_dir / "estimate.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3);
    CHECK(csv.find("ok") != std::string::npos);

    const auto manifest = nlohmann::json::parse(read_file(args.out_dir / "manifest.json"));
    CHECK(manifest["command"] == "estimate");
    CHECK(manifest["input"]["skipped_rows"] == 0);
}

TEST_CASE("estimate on a constant series flags every row and fails overall") {
    const auto dir = temp_dir("cmd_est_const");
    std::string content = "Date,Close\n";
    auto day = parse_iso_date("2015-01-01");
    for (int i = 0; i < 60; ++i) {
        content += iso_date(day) + ",10\n";
        day += std::chrono::days(1);
    }
    EstimateArgs args;
    args.prices_csv = write_file(dir, "prices.csv", content);
    args.out_dir = dir / "out";
    args.windows = {7};
    args.gamma_grid = {20.0, 40.0};
    std::ostringstream warnings;
    CHECK_THROWS_AS(cmd_estimate(args, warnings), Error);

    const std::string csv = read_file(args.out_dir / "estimate.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("ConstantReturns") != std::string::npos);
}

TEST_CASE("simulate-estimate emits the comparison and ordering tables") {
    const auto dir = temp_dir("cmd_sim_est");
    std::string config_text = kSmallConfig;
    config_text += "\n[simulation]\nsessions = 400\n";  // longer series for the windows
    const auto config = write_file(dir, "run.conf", config_text);

    SimulateEstimateArgs args;
    args.config_file = config;
    args.out_dir = dir / "out";
    args.windows = {21};
    args.gamma_grid = {20.0, 100.0, 220.0};
    std::ostringstream warnings;
    cmd_simulate_estimate(args, warnings);

    for (const char* name : {"sim_prices_r_-1.csv", "sim_prices_r_0.5.csv",
                             "estimate_compare.csv", "ordering_check.csv", "manifest.json"}) {
        CHECK(fs::exists(args.out_dir / name));
    }
    const std::string compare = read_file(args.out_dir / "estimate_compare.csv");
    CHECK(std::count(compare.begin(), compare.end(), '\n') == 1 + 2 * 3);

    // The exported series can be piped straight back into the estimator.
    EstimateArgs back;
    back.prices_csv = args.out_dir / "sim_prices_r_-1.csv";
    back.out_dir = dir / "back";
    back.windows = {21};
    back.gamma_grid = {20.0, 220.0};
    std::ostringstream sink;
    cmd_estimate(back, sink);
    CHECK(fs::exists(back.out_dir / "estimate.csv"));
}
