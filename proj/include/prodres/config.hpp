#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "prodres/csv.hpp"
#include "prodres/errors.hpp"
#include "prodres/reservoir.hpp"
#include "prodres/rng.hpp"
#include "prodres/tasks.hpp"

namespace prodres {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

enum class TaskKind { Memory, Legendre, MackeyGlass, Lorenz };

inline std::string_view task_name(TaskKind t) {
    switch (t) {
        case TaskKind::Memory: return "memory";
        case TaskKind::Legendre: return "legendre";
        case TaskKind::MackeyGlass: return "mackey_glass";
        case TaskKind::Lorenz: return "lorenz";
    }
    return "?";
}

inline TaskKind parse_task(std::string_view s) {
    if (s == "memory") return TaskKind::Memory;
    if (s == "legendre") return TaskKind::Legendre;
    if (s == "mackey_glass") return TaskKind::MackeyGlass;
    if (s == "lorenz") return TaskKind::Lorenz;
    throw config_error("unknown task: " + std::string(s));
}

inline bool is_capacity_task(TaskKind t) {
    return t == TaskKind::Memory || t == TaskKind::Legendre;
}

// Everything one experiment needs. Field names match the config-file keys
// documented in the README; grids left empty pick the per-task defaults.
struct ExperimentConfig {
    TaskKind task = TaskKind::Memory;
    std::vector<ReservoirFamily> families{ReservoirFamily::Linear, ReservoirFamily::Tanh,
                                          ReservoirFamily::Product};
    Index reservoir_size = 20;
    Index train_len = 2000;
    Index test_len = 2000;
    int tau_min = 1;
    int tau_max = 50;
    std::vector<int> orders{2, 3, 4, 5, 6, 7, 8};
    std::vector<double> omega_grid;
    std::vector<double> lambda_grid;
    int trials = 50;
    std::uint64_t master_seed = 1;
    Index washout = 0;
    double epsilon = 1e-6;
    double rcond = 1e-12;
    double ridge = 0.0;
    std::vector<int> horizons{1};
    MackeyGlassParams mg;
    Index mg_warmup = 1000;
    LorenzParams lorenz;
    Index series_len = 0; // generate subcommand; 0 = train+test+max horizon
    std::string series_csv;
    int threads = 0; // 0 = hardware concurrency
};

namespace detail {

inline std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t i = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': expected an unsigned integer, got '" + v + "'");
    }
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(key, item));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<int>(parse_int(key, item)));
    return out;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

inline std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

} // namespace detail

// Default parameter grids: a log-spaced input-scale sweep for the capacity
// tasks, a linear sweep for the chaotic-prediction tasks.
inline void apply_default_grids(ExperimentConfig& cfg) {
    if (cfg.omega_grid.empty()) {
        if (is_capacity_task(cfg.task))
            cfg.omega_grid = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
        else
            cfg.omega_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    }
    if (cfg.lambda_grid.empty()) {
        if (is_capacity_task(cfg.task))
            cfg.lambda_grid = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
        else
            cfg.lambda_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    }
}

inline void validate_config(const ExperimentConfig& cfg) {
    const auto fail = [](const std::string& msg) { throw config_error(msg); };
    if (cfg.families.empty()) fail("families must not be empty");
    if (cfg.reservoir_size < 1) fail("reservoir_size must be >= 1");
    if (cfg.train_len < 4 || cfg.test_len < 4) fail("train_len and test_len must be >= 4");
    if (cfg.omega_grid.empty() || cfg.lambda_grid.empty()) fail("parameter grids must not be empty");
    for (double w : cfg.omega_grid)
        if (!(w > 0.0) || w > 10.0) fail("omega values must lie in (0, 10]");
    for (double l : cfg.lambda_grid)
        if (!(l > 0.0) || l > 2.0) fail("lambda values must lie in (0, 2]");
    if (cfg.trials < 1) fail("trials must be >= 1");
    if (cfg.washout < 0) fail("washout must be >= 0");
    if (cfg.washout >= std::min(cfg.train_len, cfg.test_len) - 2)
        fail("washout leaves too few rows for training");
    if (!(cfg.epsilon > 0.0) || cfg.epsilon > 0.1) fail("epsilon must lie in (0, 0.1]");
    if (cfg.rcond < 0.0) fail("rcond must be >= 0");
    if (cfg.ridge < 0.0) fail("ridge must be >= 0");
    if (cfg.threads < 0) fail("threads must be >= 0");
    if (is_capacity_task(cfg.task)) {
        if (cfg.tau_min < 1) fail("tau_min must be >= 1");
        if (cfg.tau_max < cfg.tau_min) fail("tau_max must be >= tau_min");
        if (cfg.tau_max >= std::min(cfg.train_len, cfg.test_len) - 2)
            fail("tau_max leaves too few rows for training");
        if (cfg.task == TaskKind::Legendre) {
            if (cfg.orders.empty()) fail("legendre task needs at least one order");
            for (int n : cfg.orders)
                if (n < 0 || n > 20) fail("legendre orders must lie in [0, 20]");
        }
    } else {
        if (cfg.horizons.empty()) fail("prediction task needs at least one horizon");
        for (int h : cfg.horizons)
            if (h < 1) fail("horizons must be >= 1");
        if (cfg.task == TaskKind::MackeyGlass) {
            if (!(cfg.mg.dt > 0.0) || !(cfg.mg.delta > 0.0)) fail("mackey-glass dt and delta must be positive");
            const double m = cfg.mg.delta / cfg.mg.dt;
            if (std::abs(m - std::llround(m)) > 1e-9 * std::max(1.0, m) || m < 1.0)
                fail("mg_delta must be a positive integer multiple of mg_dt");
            if (cfg.mg_warmup < 0) fail("mg_warmup must be >= 0");
        }
        if (cfg.task == TaskKind::Lorenz) {
            if (!(cfg.lorenz.dt > 0.0)) fail("lorenz_dt must be positive");
            if (cfg.lorenz.transient_discard < 0) fail("lorenz_transient must be >= 0");
        }
    }
    if (cfg.series_len < 0) fail("series_len must be >= 0");
}

// Parse a key = value file ('#' starts a comment). Unknown keys are
// rejected so typos do not silently fall back to defaults.
inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file", path.string());

    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        // a key written with an empty list is a mistake, not a defaults request
        const bool list_key = key == "families" || key == "orders" || key == "omega_grid" ||
                              key == "lambda_grid" || key == "horizons";
        if (list_key && detail::split_list(value).empty())
            throw config_error(path.string() + ":" + std::to_string(lineno) + ": key '" + key +
                               "' must not be empty");

        if (key == "task") cfg.task = parse_task(value);
        else if (key == "families") {
            cfg.families.clear();
            for (const auto& f : detail::split_list(value)) cfg.families.push_back(parse_family(f));
        }
        else if (key == "reservoir_size") cfg.reservoir_size = detail::parse_int(key, value);
        else if (key == "train_len") cfg.train_len = detail::parse_int(key, value);
        else if (key == "test_len") cfg.test_len = detail::parse_int(key, value);
        else if (key == "tau_min") cfg.tau_min = static_cast<int>(detail::parse_int(key, value));
        else if (key == "tau_max") cfg.tau_max = static_cast<int>(detail::parse_int(key, value));
        else if (key == "orders") cfg.orders = detail::parse_int_list(key, value);
        else if (key == "omega_grid") cfg.omega_grid = detail::parse_double_list(key, value);
        else if (key == "lambda_grid") cfg.lambda_grid = detail::parse_double_list(key, value);
        else if (key == "trials") cfg.trials = static_cast<int>(detail::parse_int(key, value));
        else if (key == "master_seed") cfg.master_seed = detail::parse_u64(key, value);
        else if (key == "washout") cfg.washout = detail::parse_int(key, value);
        else if (key == "epsilon") cfg.epsilon = detail::parse_double(key, value);
        else if (key == "rcond") cfg.rcond = detail::parse_double(key, value);
        else if (key == "ridge") cfg.ridge = detail::parse_double(key, value);
        else if (key == "horizons") cfg.horizons = detail::parse_int_list(key, value);
        else if (key == "mg_beta") cfg.mg.beta = detail::parse_double(key, value);
        else if (key == "mg_n") cfg.mg.n = detail::parse_double(key, value);
        else if (key == "mg_gamma") cfg.mg.gamma = detail::parse_double(key, value);
        else if (key == "mg_delta") cfg.mg.delta = detail::parse_double(key, value);
        else if (key == "mg_dt") cfg.mg.dt = detail::parse_double(key, value);
        else if (key == "mg_history") cfg.mg.history_init = detail::parse_double(key, value);
        else if (key == "mg_warmup") cfg.mg_warmup = detail::parse_int(key, value);
        else if (key == "lorenz_sigma") cfg.lorenz.sigma = detail::parse_double(key, value);
        else if (key == "lorenz_rho") cfg.lorenz.rho = detail::parse_double(key, value);
        else if (key == "lorenz_beta") cfg.lorenz.beta = detail::parse_double(key, value);
        else if (key == "lorenz_dt") cfg.lorenz.dt = detail::parse_double(key, value);
        else if (key == "lorenz_init") {
            const auto v = detail::parse_double_list(key, value);
            if (v.size() != 3) throw config_error("lorenz_init needs exactly three values");
            cfg.lorenz.init = Eigen::Vector3d(v[0], v[1], v[2]);
        }
        else if (key == "lorenz_transient") cfg.lorenz.transient_discard = detail::parse_int(key, value);
        else if (key == "series_len") cfg.series_len = detail::parse_int(key, value);
        else if (key == "series_csv") cfg.series_csv = value;
        else if (key == "threads") cfg.threads = static_cast<int>(detail::parse_int(key, value));
        else throw config_error(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    apply_default_grids(cfg);
    return cfg;
}

// Canonical text form: every field, fixed order, %.17g doubles. Basis for
// the config hash embedded in output filenames.
inline std::string canonical_config_string(const ExperimentConfig& cfg) {
    std::string s;
    const auto add = [&s](std::string_view key, const std::string& v) {
        s += std::string(key) + "=" + v + "\n";
    };
    add("task", std::string(task_name(cfg.task)));
    std::string fams;
    for (std::size_t i = 0; i < cfg.families.size(); ++i)
        fams += (i ? "," : "") + std::string(family_name(cfg.families[i]));
    add("families", fams);
    add("reservoir_size", std::to_string(cfg.reservoir_size));
    add("train_len", std::to_string(cfg.train_len));
    add("test_len", std::to_string(cfg.test_len));
    add("tau_min", std::to_string(cfg.tau_min));
    add("tau_max", std::to_string(cfg.tau_max));
    add("orders", detail::join(cfg.orders));
    add("omega_grid", detail::join(cfg.omega_grid));
    add("lambda_grid", detail::join(cfg.lambda_grid));
    add("trials", std::to_string(cfg.trials));
    add("master_seed", std::to_string(cfg.master_seed));
    add("washout", std::to_string(cfg.washout));
    add("epsilon", format_double(cfg.epsilon));
    add("rcond", format_double(cfg.rcond));
    add("ridge", format_double(cfg.ridge));
    add("horizons", detail::join(cfg.horizons));
    add("mg_beta", format_double(cfg.mg.beta));
    add("mg_n", format_double(cfg.mg.n));
    add("mg_gamma", format_double(cfg.mg.gamma));
    add("mg_delta", format_double(cfg.mg.delta));
    add("mg_dt", format_double(cfg.mg.dt));
    add("mg_history", format_double(cfg.mg.history_init));
    add("mg_warmup", std::to_string(cfg.mg_warmup));
    add("lorenz_sigma", format_double(cfg.lorenz.sigma));
    add("lorenz_rho", format_double(cfg.lorenz.rho));
    add("lorenz_beta", format_double(cfg.lorenz.beta));
    add("lorenz_dt", format_double(cfg.lorenz.dt));
    add("lorenz_init", detail::join(std::vector<double>{cfg.lorenz.init(0), cfg.lorenz.init(1),
                                                        cfg.lorenz.init(2)}));
    add("lorenz_transient", std::to_string(cfg.lorenz.transient_discard));
    add("series_len", std::to_string(cfg.series_len));
    add("series_csv", cfg.series_csv);
    return s;
}

// 16-hex-digit config hash. Thread count is excluded on purpose: results
// must not depend on the worker pool size.
inline std::string config_hash(const ExperimentConfig& cfg) {
    const std::uint64_t h = hash_label(canonical_config_string(cfg));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace prodres
