#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "prodres/experiment.hpp"

using namespace prodres;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_memory_config() {
    ExperimentConfig cfg;
    cfg.task = TaskKind::Memory;
    cfg.families = {ReservoirFamily::Linear, ReservoirFamily::Product};
    cfg.reservoir_size = 10;
    cfg.train_len = 300;
    cfg.test_len = 300;
    cfg.tau_min = 1;
    cfg.tau_max = 5;
    cfg.omega_grid = {0.1, 0.5};
    cfg.lambda_grid = {0.5, 0.9};
    cfg.trials = 2;
    cfg.master_seed = 77;
    return cfg;
}

} // namespace

TEST_CASE("seed derivation is stable and collision-free") {
    REQUIRE(derive_seed(1, "tanh", {2, 3}, 4) == derive_seed(1, "tanh", {2, 3}, 4));
    REQUIRE(derive_seed(1, "tanh", {2, 3}, 4) != derive_seed(1, "tanh", {2, 3}, 5));
    REQUIRE(derive_seed(1, "tanh", {2, 3}, 4) != derive_seed(1, "tanh", {3, 2}, 4));
    REQUIRE(derive_seed(1, "tanh", {2, 3}, 4) != derive_seed(1, "linear", {2, 3}, 4));
    REQUIRE(derive_seed(1, "tanh", {2, 3}, 4) != derive_seed(2, "tanh", {2, 3}, 4));

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(1000000);
    for (int f = 0; f < 4; ++f)
        for (int w = 0; w < 10; ++w)
            for (int l = 0; l < 25; ++l)
                for (int t = 0; t < 1000; ++t)
                    seen.insert(derive_seed(99, family_name(static_cast<ReservoirFamily>(f % 3)),
                                            {w, l}, t + 1000 * (f / 3)));
    REQUIRE(seen.size() == 4u * 10u * 25u * 1000u);
}

TEST_CASE("pass-through reservoir remembers exactly one step") {
    // zero recurrence, input wired to the first node only: the state after
    // consuming u_r is (u_r, 0, ...), so delay 1 is perfectly recoverable
    // and delay >= 2 carries nothing
    WeightSet w;
    w.recurrent = Mat::Zero(4, 4);
    w.input = Mat::Zero(4, 1);
    w.input(0, 0) = 1.0;
    w.spectral_radius = 0.0;
    w.input_scale = 1.0;

    CapacityEvalParams params;
    params.task = TaskKind::Memory;
    params.orders = {1};
    params.tau_min = 1;
    params.tau_max = 4;

    const Vec u_train = uniform_input(500, 1);
    const Vec u_eval = uniform_input(500, 2);
    const auto mc = evaluate_capacity_cell(ReservoirFamily::Linear, w, u_train, u_eval, params);

    REQUIRE(mc.size() == 4);
    REQUIRE(mc[0] > 0.999);
    for (std::size_t i = 1; i < mc.size(); ++i) REQUIRE(mc[i] < 0.05);
}

TEST_CASE("a full recurrent linear reservoir recalls several delays") {
    const WeightSet w = generate_weights(10, 1, 0.9, 0.2, 5150);
    CapacityEvalParams params;
    params.tau_min = 1;
    params.tau_max = 12;
    const auto mc = evaluate_capacity_cell(ReservoirFamily::Linear, w, uniform_input(2000, 3),
                                           uniform_input(2000, 4), params);
    double total = 0.0;
    for (double v : mc) total += v;
    REQUIRE(mc[0] > 0.99);
    REQUIRE(mc[1] > 0.9);
    REQUIRE(total > 4.0);
    REQUIRE(total <= 10.5); // linear memory cannot exceed the reservoir size
}

TEST_CASE("capacity experiment produces a complete deterministic table") {
    const ExperimentConfig cfg = small_memory_config();
    const ResultTable table = run_capacity_experiment(cfg);

    // 2 families x 2x2 grid x 2 trials x (5 delays + 1 total)
    REQUIRE(table.records.size() == 2u * 4u * 2u * 6u);
    REQUIRE(table.items.size() == 2u * 4u * 2u);
    REQUIRE(table.fully_failed_cells() == 0);

    for (const auto& r : table.records) REQUIRE(std::isfinite(r.value));

    // totals equal the per-delay sums, trial by trial
    std::map<std::tuple<int, int, int, int>, double> sums;
    for (const auto& r : table.records)
        if (r.tau > 0) sums[{r.family, r.omega_idx, r.lambda_idx, r.trial}] += r.value;
    for (const auto& r : table.records)
        if (r.tau == -1)
            REQUIRE(r.value ==
                    Catch::Approx(sums[{r.family, r.omega_idx, r.lambda_idx, r.trial}]).margin(1e-12));

    const ResultTable again = run_capacity_experiment(cfg);
    for (std::size_t i = 0; i < table.records.size(); ++i) {
        REQUIRE(table.records[i].value == again.records[i].value);
        REQUIRE(table.records[i].failed == again.records[i].failed);
    }
}

TEST_CASE("worker count does not change results") {
    ExperimentConfig cfg = small_memory_config();
    cfg.threads = 1;
    const ResultTable serial = run_capacity_experiment(cfg);
    cfg.threads = 4;
    const ResultTable pooled = run_capacity_experiment(cfg);
    REQUIRE(serial.records.size() == pooled.records.size());
    for (std::size_t i = 0; i < serial.records.size(); ++i)
        REQUIRE(serial.records[i].value == pooled.records[i].value);
}

TEST_CASE("capacity experiment validates its configuration") {
    ExperimentConfig empty_grid = small_memory_config();
    empty_grid.omega_grid.clear();
    REQUIRE_THROWS_AS(run_capacity_experiment(empty_grid), config_error);

    ExperimentConfig no_trials = small_memory_config();
    no_trials.trials = 0;
    REQUIRE_THROWS_AS(run_capacity_experiment(no_trials), config_error);

    ExperimentConfig pred = small_memory_config();
    pred.task = TaskKind::MackeyGlass;
    REQUIRE_THROWS_AS(run_capacity_experiment(pred), config_error);

    ExperimentConfig bad_tau = small_memory_config();
    bad_tau.tau_min = 0;
    REQUIRE_THROWS_AS(run_capacity_experiment(bad_tau), config_error);

    ExperimentConfig bad_horizon = small_memory_config();
    bad_horizon.task = TaskKind::MackeyGlass;
    bad_horizon.horizons = {0};
    REQUIRE_THROWS_AS(run_prediction_experiment(bad_horizon), config_error);
}

TEST_CASE("an empty table emits a header-only CSV") {
    ResultTable table;
    table.cfg = small_memory_config();
    const fs::path dir = fresh_dir("prodres_empty_emit");
    const auto files = emit_results(table, "csv", dir);
    const CsvTable csv = read_csv(files[0]);
    REQUIRE_FALSE(csv.header.empty());
    REQUIRE(csv.rows.empty());
    fs::remove_all(dir);
}

TEST_CASE("linear prediction error is flat across the grid") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::MackeyGlass;
    cfg.families = {ReservoirFamily::Linear};
    cfg.reservoir_size = 60;
    cfg.train_len = 1000;
    cfg.test_len = 1000;
    cfg.omega_grid = {0.1, 0.5, 0.9};
    cfg.lambda_grid = {0.2, 0.5, 0.8};
    cfg.trials = 1;
    cfg.horizons = {1};
    cfg.master_seed = 41;

    const ResultTable table = run_prediction_experiment(cfg);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& a : table.aggregates()) {
        lo = std::min(lo, a.mean);
        hi = std::max(hi, a.mean);
    }
    REQUIRE(hi / lo < 10.0); // less than one order of magnitude of spread
}

TEST_CASE("divergent cells are recorded, not fatal") {
    ExperimentConfig cfg = small_memory_config();
    cfg.families = {ReservoirFamily::Product};
    cfg.lambda_grid = {1.8}; // log-state dynamics expand until exp overflows
    cfg.omega_grid = {1.0};
    cfg.trials = 2;
    const ResultTable table = run_capacity_experiment(cfg);
    REQUIRE(table.fully_failed_cells() == 1);
    for (const auto& r : table.records) REQUIRE(r.failed);

    const auto aggs = table.aggregates();
    for (const auto& a : aggs) {
        REQUIRE(a.ok == 0);
        REQUIRE(a.failed == 2);
    }
}

TEST_CASE("prediction experiment on a short mackey-glass run") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::MackeyGlass;
    cfg.families = {ReservoirFamily::Linear, ReservoirFamily::Tanh};
    cfg.reservoir_size = 30;
    cfg.train_len = 400;
    cfg.test_len = 400;
    cfg.omega_grid = {0.5};
    cfg.lambda_grid = {0.8};
    cfg.trials = 2;
    cfg.horizons = {1, 3};
    cfg.master_seed = 11;

    const ResultTable table = run_prediction_experiment(cfg);
    REQUIRE(table.records.size() == 2u * 2u * 2u); // families x trials x horizons
    for (const auto& r : table.records) {
        REQUIRE_FALSE(r.failed);
        REQUIRE(std::isfinite(r.value));
        REQUIRE(r.value > 0.0);
        REQUIRE(r.value_alt > 0.0);
    }

    // one-step prediction of a smooth series beats three-step
    const auto aggs = table.aggregates();
    std::map<std::pair<int, int>, double> by_family_h;
    for (const auto& a : aggs) by_family_h[{a.family, a.tau}] = a.mean;
    REQUIRE(by_family_h[{0, 1}] < by_family_h[{0, 3}]);
    REQUIRE(by_family_h[{1, 1}] < by_family_h[{1, 3}]);
}

TEST_CASE("lorenz prediction drives all three channels") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::Lorenz;
    cfg.families = {ReservoirFamily::Tanh, ReservoirFamily::Product};
    cfg.reservoir_size = 40;
    cfg.train_len = 500;
    cfg.test_len = 500;
    cfg.omega_grid = {0.1};
    cfg.lambda_grid = {0.8};
    cfg.trials = 2;
    cfg.horizons = {1};
    cfg.master_seed = 21;
    cfg.epsilon = 0.05;
    cfg.ridge = 1e-6;

    const ResultTable table = run_prediction_experiment(cfg);
    REQUIRE(table.records.size() == 4);
    for (const auto& r : table.records) {
        REQUIRE_FALSE(r.failed);
        REQUIRE(std::isfinite(r.value));
        // summed over three outputs, so a near-perfect fit still sits above 0
        REQUIRE(r.value > 0.0);
        REQUIRE(r.value < 10.0);
    }

    // dispatch helper picks the right runner
    const ResultTable same = run_experiment(cfg);
    REQUIRE(same.records.size() == table.records.size());
    for (std::size_t i = 0; i < same.records.size(); ++i)
        REQUIRE(same.records[i].value == table.records[i].value);
}

TEST_CASE("horizon sweep at a fixed cell") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::MackeyGlass;
    cfg.families = {ReservoirFamily::Tanh};
    cfg.reservoir_size = 30;
    cfg.train_len = 500;
    cfg.test_len = 500;
    cfg.omega_grid = {0.2};
    cfg.lambda_grid = {0.8};
    cfg.trials = 1;
    cfg.horizons = {1, 2, 4, 8};
    cfg.master_seed = 31;

    const ResultTable table = run_prediction_experiment(cfg);
    REQUIRE(table.records.size() == 4);
    std::map<int, double> by_h;
    for (const auto& r : table.records) by_h[r.tau] = r.value;
    // error grows with the horizon on a chaotic series
    REQUIRE(by_h.at(1) < by_h.at(4));
    REQUIRE(by_h.at(1) < by_h.at(8));
}

TEST_CASE("prediction experiment accepts a series file") {
    const fs::path dir = fresh_dir("prodres_series_in");
    const fs::path series_path = dir / "mg.csv";
    write_series_csv(series_path, mackey_glass(900, {}, 1000), {"x"});

    ExperimentConfig cfg;
    cfg.task = TaskKind::MackeyGlass;
    cfg.families = {ReservoirFamily::Tanh};
    cfg.reservoir_size = 20;
    cfg.train_len = 400;
    cfg.test_len = 400;
    cfg.omega_grid = {0.3};
    cfg.lambda_grid = {0.7};
    cfg.trials = 1;
    cfg.horizons = {1};
    cfg.series_csv = series_path.string();

    const ResultTable table = run_prediction_experiment(cfg);
    REQUIRE(table.records.size() == 1);
    REQUIRE_FALSE(table.records[0].failed);

    cfg.series_csv = (dir / "missing.csv").string();
    REQUIRE_THROWS_AS(run_prediction_experiment(cfg), io_error);
    fs::remove_all(dir);
}

TEST_CASE("emitted files are byte-identical across reruns and thread counts") {
    ExperimentConfig cfg = small_memory_config();
    const fs::path dir_a = fresh_dir("prodres_emit_a");
    const fs::path dir_b = fresh_dir("prodres_emit_b");

    cfg.threads = 1;
    const auto files_a = emit_results(run_capacity_experiment(cfg), "csv", dir_a);
    cfg.threads = 3;
    const auto files_b = emit_results(run_capacity_experiment(cfg), "csv", dir_b);

    REQUIRE(files_a.size() == files_b.size());
    for (std::size_t i = 0; i < files_a.size(); ++i) {
        REQUIRE(files_a[i].filename() == files_b[i].filename());
        REQUIRE(slurp(files_a[i]) == slurp(files_b[i]));
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("emitted CSV parses back to the in-memory aggregates") {
    const ExperimentConfig cfg = small_memory_config();
    const ResultTable table = run_capacity_experiment(cfg);
    const fs::path dir = fresh_dir("prodres_roundtrip");
    const auto files = emit_results(table, "csv", dir);

    const CsvTable csv = read_csv(files[0]);
    const auto aggs = table.aggregates();
    REQUIRE(csv.rows.size() == aggs.size());
    REQUIRE(csv.header == std::vector<std::string>{"family", "omega", "lambda", "order", "tau", "mc",
                                                   "mc_se", "trials_ok", "trials_failed"});
    for (std::size_t i = 0; i < aggs.size(); ++i) {
        REQUIRE(csv.rows[i][0] == std::string(family_name(cfg.families[aggs[i].family])));
        REQUIRE(std::strtod(csv.rows[i][1].c_str(), nullptr) == aggs[i].omega);
        REQUIRE(std::strtod(csv.rows[i][2].c_str(), nullptr) == aggs[i].lambda);
        REQUIRE(std::stoi(csv.rows[i][4]) == aggs[i].tau);
        REQUIRE(std::strtod(csv.rows[i][5].c_str(), nullptr) == aggs[i].mean);
    }
    fs::remove_all(dir);
}

TEST_CASE("json results and summary are well-formed") {
    const ExperimentConfig cfg = small_memory_config();
    const ResultTable table = run_capacity_experiment(cfg);
    const fs::path dir = fresh_dir("prodres_json");
    const auto files = emit_results(table, "json", dir);

    const auto rows = nlohmann::json::parse(slurp(files[0]));
    REQUIRE(rows.is_array());
    REQUIRE(rows.size() == table.aggregates().size());

    const auto summary = nlohmann::json::parse(slurp(files[1]));
    REQUIRE(summary["config_hash"] == config_hash(cfg));
    REQUIRE(summary["task"] == "memory");
    REQUIRE(summary["families"].contains("linear"));
    REQUIRE(summary["families"].contains("product"));
    REQUIRE(summary["families"]["linear"]["best_total_by_order"].contains("1"));
    REQUIRE(summary["fully_failed_cells"] == 0);
    fs::remove_all(dir);
}

TEST_CASE("config files parse, validate, and hash stably") {
    const fs::path dir = fresh_dir("prodres_cfg");
    const fs::path cfg_path = dir / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << "# capacity sweep\n"
            << "task = memory\n"
            << "families = linear, product\n"
            << "reservoir_size = 10\n"
            << "train_len = 300\n"
            << "test_len = 300\n"
            << "tau_max = 5\n"
            << "omega_grid = 0.1, 0.5\n"
            << "lambda_grid = 0.5, 0.9\n"
            << "trials = 2\n"
            << "master_seed = 77\n";
    }
    const ExperimentConfig cfg = parse_config_file(cfg_path);
    REQUIRE(cfg.task == TaskKind::Memory);
    REQUIRE(cfg.families.size() == 2);
    REQUIRE(cfg.reservoir_size == 10);
    REQUIRE(cfg.tau_max == 5);
    REQUIRE(cfg.omega_grid == std::vector<double>{0.1, 0.5});
    REQUIRE(cfg.trials == 2);
    validate_config(cfg);

    REQUIRE(config_hash(cfg) == config_hash(small_memory_config()));

    ExperimentConfig other = small_memory_config();
    other.master_seed = 78;
    REQUIRE(config_hash(cfg) != config_hash(other));

    {
        std::ofstream out(cfg_path, std::ios::app);
        out << "no_such_key = 3\n";
    }
    REQUIRE_THROWS_AS(parse_config_file(cfg_path), config_error);
    fs::remove_all(dir);
}

TEST_CASE("esp probe runs per lambda and converges") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::Memory;
    cfg.reservoir_size = 20;
    cfg.test_len = 800;
    cfg.omega_grid = {0.2};
    cfg.lambda_grid = {0.5, 0.9};
    cfg.trials = 1;
    const auto probes = run_esp_probe(cfg);
    REQUIRE(probes.size() == 2);
    for (const auto& p : probes) {
        REQUIRE(p.distances.size() == 800);
        REQUIRE(p.distances(0) > 0.0);
        REQUIRE(p.distances(799) < 1e-6);
    }
}
