#include "aspp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "aspp/csv.hpp"
#include "aspp/errors.hpp"

namespace aspp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double_field(std::string_view path, std::string_view value) {
    try {
        return parse_double(value);
    } catch (const Error&) {
        throw ConfigError(std::string(path) + ": expected a number, got '" + std::string(value) +
                          "'");
    }
}

std::uint64_t parse_u64_field(std::string_view path, std::string_view value) {
    std::uint64_t out = 0;
    const auto result = std::from_chars(value.data(), value.data() + value.size(), out);
    if (result.ec != std::errc{} || result.ptr != value.data() + value.size()) {
        throw ConfigError(std::string(path) + ": expected a non-negative integer, got '" +
                          std::string(value) + "'");
    }
    return out;
}

std::size_t parse_size_field(std::string_view path, std::string_view value) {
    return static_cast<std::size_t>(parse_u64_field(path, value));
}

bool parse_bool_field(std::string_view path, std::string_view value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError(std::string(path) + ": expected true or false, got '" + std::string(value) +
                      "'");
}

std::vector<double> parse_double_list(std::string_view path, std::string_view value) {
    std::vector<double> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
        if (i == value.size() || value[i] == ',') {
            const std::string_view item = trim(value.substr(start, i - start));
            if (!item.empty()) out.push_back(parse_double_field(path, item));
            start = i + 1;
        }
    }
    if (out.empty()) throw ConfigError(std::string(path) + ": expected at least one number");
    return out;
}

void set_field(SweepConfig& config, std::string_view section, std::string_view key,
               std::string_view value) {
    const std::string path = std::string(section) + "." + std::string(key);
    SimulationConfig& base = config.base;
    if (section == "population") {
        auto& p = base.population;
        if (key == "n_agents") {
            p.n_agents = parse_size_field(path, value);
        } else if (key == "mean_ln_greed") {
            p.mean_ln_greed = parse_double_field(path, value);
        } else if (key == "mean_ln_fear") {
            p.mean_ln_fear = parse_double_field(path, value);
        } else if (key == "var_ln_greed") {
            p.var_ln_greed = parse_double_field(path, value);
        } else if (key == "var_ln_fear") {
            p.var_ln_fear = parse_double_field(path, value);
        } else if (key == "trait_correlation") {
            config.trait_correlations = parse_double_list(path, value);
        } else {
            throw ConfigError(path + ": unknown key");
        }
    } else if (section == "init") {
        auto& i = base.init;
        if (key == "initial_cash") {
            i.initial_cash = parse_double_field(path, value);
        } else if (key == "initial_target_ratio") {
            i.initial_target_ratio = parse_double_field(path, value);
        } else if (key == "noise_amplitude") {
            i.noise_amplitude = parse_double_field(path, value);
        } else if (key == "initial_price") {
            i.initial_price = parse_double_field(path, value);
        } else {
            throw ConfigError(path + ": unknown key");
        }
    } else if (section == "simulation") {
        if (key == "active_per_session") {
            base.active_per_session = parse_size_field(path, value);
        } else if (key == "sessions") {
            base.sessions = parse_size_field(path, value);
        } else if (key == "rule") {
            if (value == "multiplicative") {
                base.rule.kind = UpdateRule::Kind::Multiplicative;
            } else if (value == "proportional") {
                base.rule.kind = UpdateRule::Kind::Proportional;
            } else {
                throw ConfigError(path + ": expected multiplicative or proportional, got '" +
                                  std::string(value) + "'");
            }
        } else if (key == "equality_tolerance") {
            base.rule.equality_tolerance = parse_double_field(path, value);
        } else if (key == "n_paths") {
            base.n_paths = parse_size_field(path, value);
        } else if (key == "master_seed") {
            base.master_seed = parse_u64_field(path, value);
        } else if (key == "risk_threshold") {
            base.risk_threshold = parse_double_field(path, value);
        } else if (key == "resample_traits_per_path") {
            base.resample_traits_per_path = parse_bool_field(path, value);
        } else if (key == "wealth_bins") {
            base.wealth_bins = parse_size_field(path, value);
        } else {
            throw ConfigError(path + ": unknown key");
        }
    } else {
        throw ConfigError("unknown section '" + std::string(section) + "'");
    }
}

}  // namespace

SweepConfig parse_config_text(std::string_view text, std::string_view origin) {
    SweepConfig config;
    std::string section;
    std::size_t line_no = 0;
    std::size_t cursor = 0;
    while (cursor <= text.size()) {
        const std::size_t end = text.find('\n', cursor);
        std::string_view line =
            text.substr(cursor, end == std::string_view::npos ? text.size() - cursor : end - cursor);
        cursor = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = std::string(origin) + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + ": expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key outside of any [section]");
        try {
            set_field(config, section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    return config;
}

SweepConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.filename().string());
}

void apply_override(SweepConfig& config, std::string_view key, std::string_view value) {
    const std::size_t dot = key.find('.');
    if (dot == std::string_view::npos) {
        throw ConfigError("override '" + std::string(key) + "': expected section.key");
    }
    set_field(config, trim(key.substr(0, dot)), trim(key.substr(dot + 1)), trim(value));
}

void validate(const SweepConfig& config) {
    if (config.trait_correlations.empty()) {
        throw ConfigError("population.trait_correlation: at least one level required");
    }
    for (double r : config.trait_correlations) {
        SimulationConfig level = config.base;
        level.population.trait_correlation = r;
        validate(level);
    }
}

nlohmann::json config_snapshot(const SweepConfig& config) {
    const SimulationConfig& base = config.base;
    nlohmann::json j;
    j["population"] = {
        {"n_agents", base.population.n_agents},
        {"mean_ln_greed", base.population.mean_ln_greed},
        {"mean_ln_fear", base.population.mean_ln_fear},
        {"var_ln_greed", base.population.var_ln_greed},
        {"var_ln_fear", base.population.var_ln_fear},
        {"trait_correlation", config.trait_correlations},
    };
    j["init"] = {
        {"initial_cash", base.init.initial_cash},
        {"initial_target_ratio", base.init.initial_target_ratio},
        {"noise_amplitude", base.init.noise_amplitude},
        {"initial_price", base.init.initial_price},
    };
    j["simulation"] = {
        {"active_per_session", base.active_per_session},
        {"sessions", base.sessions},
        {"rule",
         base.rule.kind == UpdateRule::Kind::Multiplicative ? "multiplicative" : "proportional"},
        {"equality_tolerance", base.rule.equality_tolerance},
        {"n_paths", base.n_paths},
        {"master_seed", base.master_seed},
        {"risk_threshold", base.risk_threshold},
        {"resample_traits_per_path", base.resample_traits_per_path},
        {"wealth_bins", base.wealth_bins},
    };
    return j;
}

}  // namespace aspp
