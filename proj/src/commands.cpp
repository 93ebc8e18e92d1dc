#include "aspp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aspp/config.hpp"
#include "aspp/csv.hpp"
#include "aspp/ensemble.hpp"
#include "aspp/errors.hpp"
#include "aspp/estimator.hpp"
#include "aspp/version.hpp"

namespace aspp {

namespace {

/// Accumulates named outputs, writes them under one directory, and keeps the
/// checksums the manifest reports.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
        out << content;
        if (!out.flush()) throw Error("failed writing '" + (dir_ / name).string() + "'");
        char hex[32];
        std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        checksums_[name] = hex;
    }

    nlohmann::json checksum_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [name, sum] : checksums_) j[name] = sum;
        return j;
    }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::string> checksums_;
};

std::string cell(double value) { return format_double(value); }

std::string cell(std::optional<double> value) {
    return value ? format_double(*value) : std::string();
}

std::string level_suffix(const SweepConfig& config, double r) {
    return config.trait_correlations.size() > 1 ? "_r_" + format_double(r) : std::string();
}

SweepConfig load_with_overrides(const std::filesystem::path& file, const Overrides& overrides) {
    SweepConfig config = load_config_file(file);
    for (const auto& [key, value] : overrides) apply_override(config, key, value);
    validate(config);
    return config;
}

unsigned resolve_workers(unsigned requested) {
    return requested != 0 ? requested : workers_from_env();
}

void emit_population_warnings(const PopulationSpec& population, std::ostream& warnings) {
    for (const std::string& w : population_warnings(population)) {
        warnings << "warning: " << w << '\n';
    }
}

nlohmann::json manifest_base(const char* command) {
    nlohmann::json j;
    j["tool"] = "aspp";
    j["version"] = std::string(kVersion);
    j["command"] = command;
    return j;
}

void write_manifest(OutputWriter& out, nlohmann::json manifest) {
    manifest["outputs"] = out.checksum_json();
    out.write("manifest.json", manifest.dump(2) + "\n");
}

std::string file_checksum(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(buffer.str())));
    return hex;
}

struct EstimateRow {
    double r_level = 0.0;
    std::size_t window = 0;
    EstimatePoint point;
};

std::string estimate_status(const EstimatePoint& point) {
    return point.ok() ? "ok" : point.error;
}

}  // namespace

unsigned workers_from_env() {
    if (const char* env = std::getenv("ASPP_WORKERS")) {
        const long value = std::strtol(env, nullptr, 10);
        if (value > 0) return static_cast<unsigned>(value);
    }
    return 0;
}

std::vector<double> default_gamma_grid() {
    std::vector<double> grid;
    for (double gamma = 20.0; gamma <= 220.0; gamma += 20.0) grid.push_back(gamma);
    return grid;
}

void cmd_simulate(const SimulateArgs& args, std::ostream& warnings) {
    const SweepConfig config = load_with_overrides(args.config_file, args.overrides);
    emit_population_warnings(config.base.population, warnings);
    const unsigned workers = resolve_workers(args.workers);

    OutputWriter out(args.out_dir);
    std::string trait_corr_csv = "trait_correlation,corr_wealth_greed,corr_wealth_fear\n";
    std::size_t total_aborted = 0;

    for (double r : config.trait_correlations) {
        SimulationConfig level = config.base;
        level.population.trait_correlation = r;
        const EnsembleStats stats = run_ensemble(level, workers);
        total_aborted += stats.aborted_paths;
        if (stats.aborted_paths > 0) {
            warnings << "warning: " << stats.aborted_paths << " of " << level.n_paths
                     << " paths aborted at trait_correlation " << format_double(r) << '\n';
        }

        const std::string suffix = level_suffix(config, r);
        std::string price_csv =
            "day,mean_log_price,std_log_return,mean_risk_proxy,predicted_log_price\n";
        for (std::size_t t = 0; t < stats.mean_log_price.size(); ++t) {
            price_csv += std::to_string(t);
            price_csv += ',';
            price_csv += cell(stats.mean_log_price[t]);
            price_csv += ',';
            price_csv += cell(stats.std_log_return[t]);
            price_csv += ',';
            price_csv += cell(stats.mean_risk_proxy[t]);
            price_csv += ',';
            price_csv += cell(stats.predicted_log_price[t]);
            price_csv += '\n';
        }
        out.write("price_stats" + suffix + ".csv", price_csv);

        std::string hist_csv = "bin_lo,bin_hi,fraction\n";
        for (const HistogramBin& bin : stats.wealth_histogram) {
            hist_csv += cell(bin.lo) + "," + cell(bin.hi) + "," + cell(bin.fraction) + "\n";
        }
        out.write("wealth_hist" + suffix + ".csv", hist_csv);

        trait_corr_csv += cell(r) + "," + cell(stats.corr_wealth_greed) + "," +
                          cell(stats.corr_wealth_fear) + "\n";
    }
    out.write("trait_corr.csv", trait_corr_csv);

    nlohmann::json manifest = manifest_base("simulate");
    manifest["master_seed"] = config.base.master_seed;
    manifest["config"] = config_snapshot(config);
    manifest["aborted_paths"] = total_aborted;
    write_manifest(out, manifest);
}

void cmd_estimate(const EstimateArgs& args, std::ostream& warnings) {
    if (args.windows.empty()) throw ConfigError("estimate: need at least one window");
    const std::vector<double> grid =
        args.gamma_grid.empty() ? default_gamma_grid() : args.gamma_grid;
    const std::size_t max_window = *std::max_element(args.windows.begin(), args.windows.end());

    const PriceCsvResult loaded =
        load_price_csv(args.prices_csv, args.date_column, args.close_column, max_window + 2);
    if (loaded.skipped_rows > 0) {
        warnings << "warning: skipped " << loaded.skipped_rows
                 << " rows with empty or null closes\n";
    }

    OutputWriter out(args.out_dir);
    std::string csv = "tau,gamma,c0,rho,cv_ln_alpha,cv_ln_beta,status\n";
    std::size_t ok_rows = 0;
    for (std::size_t window : args.windows) {
        const auto curve = correlation_curve(loaded.series, window, grid, args.fixed_c0);
        for (const EstimatePoint& point : curve) {
            csv += std::to_string(window);
            csv += ',';
            csv += cell(point.gamma);
            csv += ',';
            if (point.ok()) {
                ++ok_rows;
                csv += cell(point.c0);
                csv += ',';
                csv += cell(point.rho);
                csv += ',';
                csv += cell(point.cv_ln_alpha);
                csv += ',';
                csv += cell(point.cv_ln_beta);
            } else {
                csv += ",,,";
            }
            csv += ',';
            csv += estimate_status(point);
            csv += '\n';
        }
    }
    out.write("estimate.csv", csv);

    nlohmann::json manifest = manifest_base("estimate");
    manifest["input"] = {{"prices_csv", args.prices_csv.string()},
                         {"checksum", file_checksum(args.prices_csv)},
                         {"skipped_rows", loaded.skipped_rows}};
    nlohmann::json params;
    params["tau"] = args.windows;
    params["gamma"] = grid;
    params["date_column"] = args.date_column;
    params["close_column"] = args.close_column;
    if (args.fixed_c0) params["c0"] = *args.fixed_c0;
    manifest["params"] = params;
    write_manifest(out, manifest);

    if (ok_rows == 0) {
        throw Error("estimate: every (tau, gamma) point failed; see estimate.csv for flags");
    }
}

void cmd_simulate_estimate(const SimulateEstimateArgs& args, std::ostream& warnings) {
    if (args.windows.empty()) throw ConfigError("simulate-estimate: need at least one window");
    const SweepConfig config = load_with_overrides(args.config_file, args.overrides);
    emit_population_warnings(config.base.population, warnings);
    const std::vector<double> grid =
        args.gamma_grid.empty() ? default_gamma_grid() : args.gamma_grid;

    OutputWriter out(args.out_dir);
    std::vector<EstimateRow> rows;
    for (double r : config.trait_correlations) {
        SimulationConfig level = config.base;
        level.population.trait_correlation = r;
        const PathStats path = run_path(level, 0);

        PriceSeries series;
        series.dates.reserve(path.log_price.size());
        series.closes.reserve(path.log_price.size());
        const std::chrono::sys_days start =
            std::chrono::year{2000} / std::chrono::January / std::chrono::day{1};
        std::string price_csv = "Date,Close\n";
        for (std::size_t t = 0; t < path.log_price.size(); ++t) {
            const auto date = start + std::chrono::days(static_cast<long>(t));
            const double close = level.init.initial_price * std::exp(path.log_price[t]);
            series.dates.push_back(date);
            series.closes.push_back(close);
            price_csv += iso_date(date) + "," + cell(close) + "\n";
        }
        out.write("sim_prices" + level_suffix(config, r) + ".csv", price_csv);

        for (std::size_t window : args.windows) {
            const auto curve = correlation_curve(series, window, grid, args.fixed_c0);
            for (const EstimatePoint& point : curve) {
                rows.push_back({r, window, point});
            }
        }
    }

    std::string compare_csv = "r_level,tau,gamma,c0,rho,status\n";
    for (const EstimateRow& row : rows) {
        compare_csv += cell(row.r_level) + "," + std::to_string(row.window) + "," +
                       cell(row.point.gamma) + ",";
        if (row.point.ok()) {
            compare_csv += cell(row.point.c0) + "," + cell(row.point.rho);
        } else {
            compare_csv += ",";
        }
        compare_csv += "," + estimate_status(row.point) + "\n";
    }
    out.write("estimate_compare.csv", compare_csv);

    // Ordering check between the lowest and highest correlation level: the
    // low-correlation curve is expected to run below the high one.
    const auto [r_lo_it, r_hi_it] = std::minmax_element(config.trait_correlations.begin(),
                                                        config.trait_correlations.end());
    std::string ordering_csv = "tau,gamma,rho_low_r,rho_high_r,low_leq_high\n";
    if (config.trait_correlations.size() > 1) {
        auto find_row = [&](double r, std::size_t window, double gamma) -> const EstimateRow* {
            for (const EstimateRow& row : rows) {
                if (row.r_level == r && row.window == window && row.point.gamma == gamma &&
                    row.point.ok()) {
                    return &row;
                }
            }
            return nullptr;
        };
        for (std::size_t window : args.windows) {
            for (double gamma : grid) {
                const EstimateRow* low = find_row(*r_lo_it, window, gamma);
                const EstimateRow* high = find_row(*r_hi_it, window, gamma);
                if (low == nullptr || high == nullptr) continue;
                ordering_csv += std::to_string(window) + "," + cell(gamma) + "," +
                                cell(low->point.rho) + "," + cell(high->point.rho) + "," +
                                (low->point.rho <= high->point.rho ? "true" : "false") + "\n";
            }
        }
    }
    out.write("ordering_check.csv", ordering_csv);

    nlohmann::json manifest = manifest_base("simulate-estimate");
    manifest["master_seed"] = config.base.master_seed;
    manifest["config"] = config_snapshot(config);
    nlohmann::json params;
    params["tau"] = args.windows;
    params["gamma"] = grid;
    if (args.fixed_c0) params["c0"] = *args.fixed_c0;
    manifest["params"] = params;
    write_manifest(out, manifest);
}

}  // namespace aspp
