// prodres: reservoir-computing benchmark runner.
//
// Subcommands
//   capacity   delay-recall / Legendre capacity sweep over an (omega, lambda) grid
//   predict    chaotic one-/multi-step prediction sweep (Mackey-Glass, Lorenz)
//   multistep  horizon sweep at one fixed (omega, lambda)
//   generate   emit a chaotic benchmark series as CSV
//   esp-check  initial-state convergence probe for product reservoirs
//
// Exit codes: 0 success, 1 validation error, 2 every trial of some grid cell
// diverged, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prodres/prodres.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "results";
    std::string format = "csv";
    int threads = -1; // -1: not set on the command line
    bool seed_set = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file (key = value lines)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", args.format, "results table format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--threads", args.threads, "worker threads (default: PRODRES_THREADS or all cores)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; args.seed_set = true; },
        "override master_seed from the config");
}

prodres::ExperimentConfig load_config(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = prodres::parse_config_file(args.config_path);
    if (args.seed_set) cfg.master_seed = args.seed;
    if (args.threads >= 0) {
        cfg.threads = args.threads;
    } else if (const char* env = std::getenv("PRODRES_THREADS")) {
        cfg.threads = static_cast<int>(std::strtol(env, nullptr, 10));
        if (cfg.threads < 0) throw prodres::config_error("PRODRES_THREADS must be >= 0");
    }
    return cfg;
}

int finish_run(const prodres::ResultTable& table, const CommonArgs& args) {
    const auto files = prodres::emit_results(table, args.format, args.out_dir);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
    const int dead_cells = table.fully_failed_cells();
    if (dead_cells > 0) {
        std::cerr << dead_cells << " grid cell(s) diverged in every trial\n";
        return 2;
    }
    return 0;
}

int cmd_capacity(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = load_config(args);
    if (!prodres::is_capacity_task(cfg.task))
        throw prodres::config_error("capacity subcommand needs task = memory or legendre");
    return finish_run(prodres::run_capacity_experiment(cfg), args);
}

int cmd_predict(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = load_config(args);
    if (prodres::is_capacity_task(cfg.task))
        throw prodres::config_error("predict subcommand needs task = mackey_glass or lorenz");
    return finish_run(prodres::run_prediction_experiment(cfg), args);
}

int cmd_multistep(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = load_config(args);
    if (prodres::is_capacity_task(cfg.task))
        throw prodres::config_error("multistep subcommand needs task = mackey_glass or lorenz");
    if (cfg.omega_grid.size() != 1 || cfg.lambda_grid.size() != 1)
        throw prodres::config_error(
            "multistep sweeps horizons at one fixed (omega, lambda); configure single-value grids");
    if (cfg.horizons.size() < 2)
        throw prodres::config_error("multistep needs a horizons list with at least two entries");
    return finish_run(prodres::run_prediction_experiment(cfg), args);
}

int cmd_generate(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = load_config(args);
    if (prodres::is_capacity_task(cfg.task))
        throw prodres::config_error("generate subcommand needs task = mackey_glass or lorenz");
    prodres::validate_config(cfg);

    const int max_h = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
    const prodres::Index len =
        cfg.series_len > 0 ? cfg.series_len : cfg.train_len + cfg.test_len + max_h;

    prodres::Mat series;
    std::vector<std::string> columns;
    if (cfg.task == prodres::TaskKind::MackeyGlass) {
        series = prodres::mackey_glass(len, cfg.mg, cfg.mg_warmup);
        columns = {"x"};
    } else {
        series = prodres::lorenz(len, cfg.lorenz);
        columns = {"x", "y", "z"};
    }

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) throw prodres::io_error("cannot create output directory", args.out_dir);
    const std::filesystem::path path =
        std::filesystem::path(args.out_dir) /
        (std::string(prodres::task_name(cfg.task)) + "_" + prodres::config_hash(cfg) + "_series.csv");
    prodres::write_series_csv(path, series, columns);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_esp_check(const CommonArgs& args) {
    prodres::ExperimentConfig cfg = load_config(args);
    const auto probes = prodres::run_esp_probe(cfg);

    std::cout << "lambda,t,distance\n";
    for (const auto& p : probes) {
        const prodres::Index last = p.distances.size() - 1;
        for (prodres::Index t = 0; t <= last; ++t) {
            if (t % 25 != 0 && t != last) continue; // decimate, full curve goes to the CSV
            std::cout << prodres::format_double(p.lambda) << ',' << t << ','
                      << prodres::format_double(p.distances(t)) << "\n";
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) throw prodres::io_error("cannot create output directory", args.out_dir);
    prodres::Index rows = 0;
    for (const auto& p : probes) rows += p.distances.size();
    prodres::Mat table(rows, 3);
    prodres::Index r = 0;
    for (const auto& p : probes)
        for (prodres::Index t = 0; t < p.distances.size(); ++t, ++r)
            table.row(r) << p.lambda, static_cast<double>(t), p.distances(t);
    const std::filesystem::path path = std::filesystem::path(args.out_dir) /
                                       ("esp_" + prodres::config_hash(cfg) + ".csv");
    prodres::write_series_csv(path, table, {"lambda", "t", "distance"});
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reservoir computing benchmarks: additive and product reservoirs"};
    app.require_subcommand(1);

    CommonArgs args;
    int (*handler)(const CommonArgs&) = nullptr;

    for (const auto& [name, desc, fn] :
         {std::tuple{"capacity", "run a memory / Legendre capacity sweep", &cmd_capacity},
          std::tuple{"predict", "run a chaotic prediction sweep", &cmd_predict},
          std::tuple{"multistep", "sweep prediction horizons at fixed parameters", &cmd_multistep},
          std::tuple{"generate", "emit a chaotic benchmark series as CSV", &cmd_generate},
          std::tuple{"esp-check", "probe initial-state convergence of the product reservoir",
                     &cmd_esp_check}}) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, args);
        cmd->callback([&handler, fn]() { handler = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return handler(args);
    } catch (const prodres::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const prodres::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
