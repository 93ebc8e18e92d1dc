#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aspp/commands.hpp"
#include "aspp/csv.hpp"
#include "aspp/errors.hpp"
#include "aspp/version.hpp"

namespace {

// Exit codes: 0 success, 2 validation problem, 3 runtime failure.
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

aspp::Overrides parse_overrides(const std::vector<std::string>& raw) {
    aspp::Overrides overrides;
    for (const std::string& item : raw) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw aspp::ConfigError("--set '" + item + "': expected section.key=value");
        }
        overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return overrides;
}

std::vector<std::size_t> parse_window_list(const std::string& text) {
    std::vector<std::size_t> windows;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            const std::string item = text.substr(start, i - start);
            start = i + 1;
            if (item.empty()) continue;
            try {
                windows.push_back(static_cast<std::size_t>(std::stoull(item)));
            } catch (const std::exception&) {
                throw aspp::ConfigError("--tau: bad window '" + item + "'");
            }
        }
    }
    if (windows.empty()) throw aspp::ConfigError("--tau: need at least one window");
    return windows;
}

/// Either a comma list ("20,40,60") or an inclusive range "lo:hi:step".
std::vector<double> parse_gamma_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0, step = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0) {
            throw aspp::ConfigError("--gamma: expected lo:hi:step with step > 0");
        }
        for (double g = lo; g <= hi + 1e-9 * step; g += step) grid.push_back(g);
    } else {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ',') {
                const std::string item = text.substr(start, i - start);
                start = i + 1;
                if (item.empty()) continue;
                grid.push_back(aspp::parse_double(item));
            }
        }
    }
    if (grid.empty()) throw aspp::ConfigError("--gamma: empty grid");
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aspp: heterogeneous adaptive-trader market simulator and estimator"};
    app.set_version_flag("--version", std::string(aspp::kVersion));
    app.require_subcommand(1);

    std::string config_file, out_dir, prices_csv;
    std::string tau_text, gamma_text, date_column = "Date", close_column = "Close";
    std::vector<std::string> set_items;
    double fixed_c0 = 0.0;

    CLI::App* simulate = app.add_subcommand("simulate", "run the configured ensembles");
    simulate->add_option("config", config_file, "config file")->required();
    simulate->add_option("-o,--out", out_dir, "output directory")->required();
    simulate->add_option("--set", set_items, "override a config value (section.key=value)");

    CLI::App* estimate = app.add_subcommand("estimate", "estimate trait curves from a price CSV");
    estimate->add_option("prices", prices_csv, "daily close CSV")->required();
    estimate->add_option("-o,--out", out_dir, "output directory")->required();
    estimate->add_option("--tau", tau_text, "rolling windows, e.g. 7,14,21");
    estimate->add_option("--gamma", gamma_text, "gamma grid: list or lo:hi:step");
    CLI::Option* c0_opt = estimate->add_option("--c0", fixed_c0, "fixed c0 (skip calibration)");
    estimate->add_option("--date-column", date_column, "date column name");
    estimate->add_option("--close-column", close_column, "close column name");

    CLI::App* sim_est = app.add_subcommand(
        "simulate-estimate", "simulate one path per correlation level and estimate on it");
    sim_est->add_option("config", config_file, "config file")->required();
    sim_est->add_option("-o,--out", out_dir, "output directory")->required();
    sim_est->add_option("--tau", tau_text, "rolling windows, e.g. 21");
    sim_est->add_option("--gamma", gamma_text, "gamma grid: list or lo:hi:step");
    CLI::Option* c0_opt2 = sim_est->add_option("--c0", fixed_c0, "fixed c0 (skip calibration)");
    sim_est->add_option("--set", set_items, "override a config value (section.key=value)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            aspp::SimulateArgs args;
            args.config_file = config_file;
            args.out_dir = out_dir;
            args.overrides = parse_overrides(set_items);
            aspp::cmd_simulate(args, std::cerr);
        } else if (estimate->parsed()) {
            aspp::EstimateArgs args;
            args.prices_csv = prices_csv;
            args.out_dir = out_dir;
            if (!tau_text.empty()) args.windows = parse_window_list(tau_text);
            if (!gamma_text.empty()) args.gamma_grid = parse_gamma_grid(gamma_text);
            if (c0_opt->count() > 0) args.fixed_c0 = fixed_c0;
            args.date_column = date_column;
            args.close_column = close_column;
            aspp::cmd_estimate(args, std::cerr);
        } else if (sim_est->parsed()) {
            aspp::SimulateEstimateArgs args;
            args.config_file = config_file;
            args.out_dir = out_dir;
            args.overrides = parse_overrides(set_items);
            if (!tau_text.empty()) args.windows = parse_window_list(tau_text);
            if (!gamma_text.empty()) args.gamma_grid = parse_gamma_grid(gamma_text);
            if (c0_opt2->count() > 0) args.fixed_c0 = fixed_c0;
            aspp::cmd_simulate_estimate(args, std::cerr);
        }
    } catch (const aspp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const aspp::CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const aspp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
