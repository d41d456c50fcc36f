#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "prodres/config.hpp"
#include "prodres/csv.hpp"
#include "prodres/metrics.hpp"
#include "prodres/readout.hpp"
#include "prodres/reservoir.hpp"
#include "prodres/tasks.hpp"
#include "prodres/thread_pool.hpp"

namespace prodres {

// Collision-resistant seed stream per (experiment, grid cell, trial), so
// every work item draws independent, reproducible randomness regardless of
// scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view family,
                                 std::pair<int, int> cell, int trial) {
    std::uint64_t h = splitmix64(master);
    h = mix_seed(h, hash_label(family));
    h = mix_seed(h, static_cast<std::uint32_t>(cell.first));
    h = mix_seed(h, static_cast<std::uint32_t>(cell.second));
    h = mix_seed(h, static_cast<std::uint32_t>(trial));
    return h;
}

// One metric observation. For capacity tasks `value` is the capacity at
// delay `tau` (tau == -1 carries the per-order total); for prediction tasks
// `tau` is the horizon, `value` the summed normalized error and `value_alt`
// its conventional MSE/Var companion.
struct TrialRecord {
    int family = 0; // index into cfg.families
    int omega_idx = 0;
    int lambda_idx = 0;
    int order = 0;
    int tau = 0;
    int trial = 0;
    bool failed = false;
    double value = 0.0;
    double value_alt = 0.0;
};

struct ItemStatus {
    int family = 0;
    int omega_idx = 0;
    int lambda_idx = 0;
    int trial = 0;
    bool failed = false;
};

struct AggregateRow {
    int family = 0;
    double omega = 0.0;
    double lambda = 0.0;
    int order = 0;
    int tau = 0;
    double mean = 0.0;
    double se = 0.0;
    double mean_alt = 0.0;
    int ok = 0;
    int failed = 0;
};

struct ResultTable {
    ExperimentConfig cfg;
    std::vector<TrialRecord> records;
    std::vector<ItemStatus> items;

    // Mean over non-failed trials per cell, with trial counts recorded.
    std::vector<AggregateRow> aggregates() const {
        using Key = std::tuple<int, int, int, int, int>;
        std::map<Key, AggregateRow> agg;
        std::map<Key, std::pair<double, double>> sums; // value, value_alt
        std::map<Key, std::vector<double>> samples;
        for (const auto& r : records) {
            const Key k{r.family, r.omega_idx, r.lambda_idx, r.order, r.tau};
            auto& row = agg[k];
            row.family = r.family;
            row.omega = cfg.omega_grid[static_cast<std::size_t>(r.omega_idx)];
            row.lambda = cfg.lambda_grid[static_cast<std::size_t>(r.lambda_idx)];
            row.order = r.order;
            row.tau = r.tau;
            if (r.failed) {
                ++row.failed;
            } else {
                ++row.ok;
                sums[k].first += r.value;
                sums[k].second += r.value_alt;
                samples[k].push_back(r.value);
            }
        }
        std::vector<AggregateRow> out;
        out.reserve(agg.size());
        for (auto& [k, row] : agg) {
            if (row.ok > 0) {
                row.mean = sums[k].first / row.ok;
                row.mean_alt = sums[k].second / row.ok;
                if (row.ok > 1) {
                    double ss = 0.0;
                    for (double v : samples[k]) ss += (v - row.mean) * (v - row.mean);
                    row.se = std::sqrt(ss / (row.ok - 1)) / std::sqrt(static_cast<double>(row.ok));
                }
            }
            out.push_back(row);
        }
        return out;
    }

    // Cells whose trials all diverged; a nonzero count maps to CLI exit 2.
    int fully_failed_cells() const {
        std::map<std::tuple<int, int, int>, std::pair<int, int>> per_cell; // ok, failed
        for (const auto& it : items) {
            auto& [ok, failed] = per_cell[{it.family, it.omega_idx, it.lambda_idx}];
            (it.failed ? failed : ok) += 1;
        }
        int count = 0;
        for (const auto& [k, c] : per_cell)
            if (c.first == 0 && c.second > 0) ++count;
        return count;
    }
};

// ---------------------------------------------------------------------------
// Capacity experiments (delay recall and Legendre reconstruction)
// ---------------------------------------------------------------------------

struct CapacityEvalParams {
    TaskKind task = TaskKind::Memory;
    std::vector<int> orders{1}; // {1} for plain delay recall
    int tau_min = 1;
    int tau_max = 50;
    Index washout = 0;
    double rcond = 1e-12;
    double ridge = 0.0;
    double epsilon = 1e-6;
};

// Train-and-evaluate one reservoir on the capacity task. A fresh readout is
// trained per (order, delay) on the training stream; capacities are measured
// on the evaluation stream with the reservoir state reinitialized. The
// trajectory row recorded after consuming input r is regressed against
// u_{r-(tau-1)}, so delay tau = 1 refers to the input consumed at that very
// step. Returns orders.size() * n_tau capacities, row-major by order.
inline std::vector<double> evaluate_capacity_cell(ReservoirFamily family, const WeightSet& weights,
                                                  const Vec& u_train, const Vec& u_eval,
                                                  const CapacityEvalParams& p) {
    const ReservoirSpec spec = make_reservoir(family, weights, p.epsilon);
    const Trajectory<> traj_train = run_reservoir(spec, u_train, p.washout);
    const Trajectory<> traj_eval = run_reservoir(spec, u_eval, p.washout);
    const Mat aug_train = traj_train.augmented();
    const Mat aug_eval = traj_eval.augmented();

    const int n_tau = p.tau_max - p.tau_min + 1;
    std::vector<double> out;
    out.reserve(p.orders.size() * static_cast<std::size_t>(n_tau));

    for (int order : p.orders) {
        for (int tau = p.tau_min; tau <= p.tau_max; ++tau) {
            const int shift = tau - 1;
            const AlignedTarget target_train =
                p.task == TaskKind::Memory ? delay_target(u_train, shift)
                                           : legendre_target(u_train, order, shift);
            const AlignedTarget target_eval =
                p.task == TaskKind::Memory ? delay_target(u_eval, shift)
                                           : legendre_target(u_eval, order, shift);

            const Index first_train = std::max<Index>(target_train.start, p.washout);
            const Index first_eval = std::max<Index>(target_eval.start, p.washout);
            const Index rows_train = u_train.size() - first_train;
            const Index rows_eval = u_eval.size() - first_eval;
            if (rows_train < 2 || rows_eval < 2)
                throw std::invalid_argument("evaluate_capacity_cell: delay leaves too few rows");

            const Mat design = aug_train.bottomRows(rows_train);
            const Vec targets = target_train.values.tail(rows_train);
            const Vec psi = solve_least_squares<double>(design, targets, p.rcond, p.ridge);

            const Vec predicted = aug_eval.bottomRows(rows_eval) * psi;
            const Vec wanted = target_eval.values.tail(rows_eval);
            out.push_back(capacity(predicted, wanted).value);
        }
    }
    return out;
}

inline ResultTable run_capacity_experiment(const ExperimentConfig& cfg_in) {
    const ExperimentConfig& cfg = cfg_in;
    validate_config(cfg);
    if (!is_capacity_task(cfg.task))
        throw config_error("run_capacity_experiment: task must be memory or legendre");

    CapacityEvalParams params;
    params.task = cfg.task;
    params.orders = cfg.task == TaskKind::Memory ? std::vector<int>{1} : cfg.orders;
    params.tau_min = cfg.tau_min;
    params.tau_max = cfg.tau_max;
    params.washout = cfg.washout;
    params.rcond = cfg.rcond;
    params.ridge = cfg.ridge;
    params.epsilon = cfg.epsilon;

    // One input realization per trial index, shared across families and
    // grid cells so parameter comparisons see identical data.
    std::vector<Vec> train_inputs(cfg.trials), eval_inputs(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t) {
        train_inputs[t] = uniform_input(cfg.train_len, derive_seed(cfg.master_seed, "input/train", {0, 0}, t));
        eval_inputs[t] = uniform_input(cfg.test_len, derive_seed(cfg.master_seed, "input/eval", {0, 0}, t));
    }

    const int n_w = static_cast<int>(cfg.omega_grid.size());
    const int n_l = static_cast<int>(cfg.lambda_grid.size());
    const Index n_items =
        static_cast<Index>(cfg.families.size()) * n_w * n_l * cfg.trials;

    struct ItemOutcome {
        bool failed = false;
        std::vector<double> mc;
    };
    std::vector<ItemOutcome> outcomes(n_items);

    const auto decode = [&](Index i) {
        const int trial = static_cast<int>(i % cfg.trials);
        i /= cfg.trials;
        const int li = static_cast<int>(i % n_l);
        i /= n_l;
        const int wi = static_cast<int>(i % n_w);
        i /= n_w;
        const int f = static_cast<int>(i);
        return std::tuple{f, wi, li, trial};
    };

    parallel_for_index(n_items, cfg.threads, [&](Index i) {
        const auto [f, wi, li, trial] = decode(i);
        const ReservoirFamily family = cfg.families[static_cast<std::size_t>(f)];
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, family_name(family), {wi, li}, trial);
        try {
            const WeightSet weights =
                generate_weights(cfg.reservoir_size, 1, cfg.lambda_grid[li], cfg.omega_grid[wi], seed);
            outcomes[i].mc = evaluate_capacity_cell(family, weights, train_inputs[trial],
                                                    eval_inputs[trial], params);
            for (double v : outcomes[i].mc)
                if (!std::isfinite(v)) outcomes[i].failed = true;
        } catch (const divergence_error&) {
            outcomes[i].failed = true;
        }
    });

    ResultTable table;
    table.cfg = cfg;
    const int n_tau = params.tau_max - params.tau_min + 1;
    for (Index i = 0; i < n_items; ++i) {
        const auto [f, wi, li, trial] = decode(i);
        const ItemOutcome& oc = outcomes[i];
        table.items.push_back({f, wi, li, trial, oc.failed});
        for (std::size_t oi = 0; oi < params.orders.size(); ++oi) {
            double total = 0.0;
            for (int ti = 0; ti < n_tau; ++ti) {
                TrialRecord r;
                r.family = f;
                r.omega_idx = wi;
                r.lambda_idx = li;
                r.order = params.orders[oi];
                r.tau = params.tau_min + ti;
                r.trial = trial;
                r.failed = oc.failed;
                r.value = oc.failed ? 0.0 : oc.mc[oi * n_tau + ti];
                total += r.value;
                table.records.push_back(r);
            }
            TrialRecord sum;
            sum.family = f;
            sum.omega_idx = wi;
            sum.lambda_idx = li;
            sum.order = params.orders[oi];
            sum.tau = -1; // per-order total over the delay range
            sum.trial = trial;
            sum.failed = oc.failed;
            sum.value = oc.failed ? 0.0 : total;
            table.records.push_back(sum);
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Chaotic prediction experiments (Mackey-Glass, Lorenz)
// ---------------------------------------------------------------------------

// Load or generate the raw benchmark series for a prediction config.
inline Mat prediction_series(const ExperimentConfig& cfg) {
    const int max_h = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
    const Index need = cfg.train_len + cfg.test_len + max_h;
    if (!cfg.series_csv.empty()) {
        auto [data, names] = read_series_csv(cfg.series_csv);
        const Index expect_cols = cfg.task == TaskKind::Lorenz ? 3 : 1;
        if (data.cols() != expect_cols)
            throw config_error("series_csv has " + std::to_string(data.cols()) +
                               " columns, task needs " + std::to_string(expect_cols));
        if (data.rows() < need)
            throw config_error("series_csv too short: need " + std::to_string(need) + " rows");
        return data;
    }
    if (cfg.task == TaskKind::MackeyGlass) return mackey_glass(need, cfg.mg, cfg.mg_warmup);
    return lorenz(need, cfg.lorenz);
}

inline ResultTable run_prediction_experiment(const ExperimentConfig& cfg_in) {
    const ExperimentConfig& cfg = cfg_in;
    validate_config(cfg);
    if (is_capacity_task(cfg.task))
        throw config_error("run_prediction_experiment: task must be mackey_glass or lorenz");

    const Mat raw = prediction_series(cfg);
    const auto [scaled, affine] = rescale_unit(raw, cfg.epsilon);
    const Index n_outputs = scaled.cols();
    const auto& horizons = cfg.horizons;
    const Index n_h = static_cast<Index>(horizons.size());

    const Mat train_inputs = scaled.topRows(cfg.train_len);
    const Mat test_inputs = scaled.middleRows(cfg.train_len, cfg.test_len);

    // Target blocks per horizon: input row i pairs with series row i+h.
    Mat train_targets(cfg.train_len - cfg.washout, n_h * n_outputs);
    Mat test_targets(cfg.test_len - cfg.washout, n_h * n_outputs);
    for (Index hi = 0; hi < n_h; ++hi) {
        const int h = horizons[static_cast<std::size_t>(hi)];
        train_targets.middleCols(hi * n_outputs, n_outputs) =
            scaled.middleRows(h + cfg.washout, cfg.train_len - cfg.washout);
        test_targets.middleCols(hi * n_outputs, n_outputs) =
            scaled.middleRows(cfg.train_len + h + cfg.washout, cfg.test_len - cfg.washout);
    }

    const int n_w = static_cast<int>(cfg.omega_grid.size());
    const int n_l = static_cast<int>(cfg.lambda_grid.size());
    const Index n_items =
        static_cast<Index>(cfg.families.size()) * n_w * n_l * cfg.trials;

    struct ItemOutcome {
        bool failed = false;
        std::vector<std::array<double, 2>> per_horizon; // paper-form NMSE, conventional
    };
    std::vector<ItemOutcome> outcomes(n_items);

    const auto decode = [&](Index i) {
        const int trial = static_cast<int>(i % cfg.trials);
        i /= cfg.trials;
        const int li = static_cast<int>(i % n_l);
        i /= n_l;
        const int wi = static_cast<int>(i % n_w);
        i /= n_w;
        const int f = static_cast<int>(i);
        return std::tuple{f, wi, li, trial};
    };

    parallel_for_index(n_items, cfg.threads, [&](Index i) {
        const auto [f, wi, li, trial] = decode(i);
        const ReservoirFamily family = cfg.families[static_cast<std::size_t>(f)];
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, family_name(family), {wi, li}, trial);
        try {
            const WeightSet weights = generate_weights(cfg.reservoir_size, n_outputs,
                                                       cfg.lambda_grid[li], cfg.omega_grid[wi], seed);
            const ReservoirSpec spec = make_reservoir(family, weights, cfg.epsilon);
            const Mat aug_train = run_reservoir(spec, train_inputs, cfg.washout).augmented();
            const Mat aug_test = run_reservoir(spec, test_inputs, cfg.washout).augmented();

            // one decomposition covers all horizons and outputs
            const Mat psi = solve_least_squares<double>(aug_train, train_targets, cfg.rcond, cfg.ridge);
            const Mat predicted = aug_test * psi;

            auto& oc = outcomes[i];
            oc.per_horizon.resize(horizons.size());
            for (Index hi = 0; hi < n_h; ++hi) {
                std::vector<double> per_out, per_out_conv;
                for (Index m = 0; m < n_outputs; ++m) {
                    const Vec y = predicted.col(hi * n_outputs + m);
                    const Vec want = test_targets.col(hi * n_outputs + m);
                    per_out.push_back(nmse(y, want));
                    per_out_conv.push_back(nmse_conventional(y, want));
                }
                oc.per_horizon[hi] = {nmse_total(per_out), nmse_total(per_out_conv)};
                if (!std::isfinite(oc.per_horizon[hi][0]) || !std::isfinite(oc.per_horizon[hi][1]))
                    oc.failed = true;
            }
        } catch (const divergence_error&) {
            outcomes[i].failed = true;
        }
    });

    ResultTable table;
    table.cfg = cfg;
    for (Index i = 0; i < n_items; ++i) {
        const auto [f, wi, li, trial] = decode(i);
        const ItemOutcome& oc = outcomes[i];
        table.items.push_back({f, wi, li, trial, oc.failed});
        for (Index hi = 0; hi < n_h; ++hi) {
            TrialRecord r;
            r.family = f;
            r.omega_idx = wi;
            r.lambda_idx = li;
            r.order = 0;
            r.tau = horizons[static_cast<std::size_t>(hi)];
            r.trial = trial;
            r.failed = oc.failed;
            if (!oc.failed) {
                r.value = oc.per_horizon[hi][0];
                r.value_alt = oc.per_horizon[hi][1];
            }
            table.records.push_back(r);
        }
    }
    return table;
}

inline ResultTable run_experiment(const ExperimentConfig& cfg) {
    return is_capacity_task(cfg.task) ? run_capacity_experiment(cfg)
                                      : run_prediction_experiment(cfg);
}

// ---------------------------------------------------------------------------
// Echo-state probe
// ---------------------------------------------------------------------------

struct EspProbeResult {
    double lambda = 0.0;
    Vec distances;
};

// Drive two product reservoirs from random positive initial states with an
// identical clamped uniform input stream and record the distance curve, one
// probe per lambda in the grid. The input scale is the first omega value.
inline std::vector<EspProbeResult> run_esp_probe(const ExperimentConfig& cfg) {
    validate_config(cfg);

    const double omega = cfg.omega_grid.front();
    std::vector<EspProbeResult> out;
    for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        const double lambda = cfg.lambda_grid[li];
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, "esp/weights", {0, static_cast<int>(li)}, 0);
        const WeightSet weights = generate_weights(cfg.reservoir_size, 1, lambda, omega, seed);
        const ReservoirSpec spec = make_reservoir(ReservoirFamily::Product, weights, cfg.epsilon);

        Vec inputs = uniform_input(cfg.test_len, derive_seed(cfg.master_seed, "esp/input", {0, 0}, 0));
        for (Index i = 0; i < inputs.size(); ++i) inputs(i) = std::max(inputs(i), cfg.epsilon);

        std::mt19937_64 gen(derive_seed(cfg.master_seed, "esp/init", {0, static_cast<int>(li)}, 0));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Vec a(cfg.reservoir_size), b(cfg.reservoir_size);
        for (Index i = 0; i < cfg.reservoir_size; ++i) a(i) = 2.0 * (1.0 - unit(gen));
        for (Index i = 0; i < cfg.reservoir_size; ++i) b(i) = 2.0 * (1.0 - unit(gen));

        out.push_back({lambda, esp_divergence<double>(spec, inputs, a, b)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

namespace detail {

inline void verify_aggregates(const ResultTable& table, const std::vector<AggregateRow>& aggs) {
    // independent re-accumulation; emitted aggregates must equal the mean of
    // the recorded per-trial rows
    for (const auto& a : aggs) {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : table.records) {
            if (r.family != a.family || r.order != a.order || r.tau != a.tau || r.failed) continue;
            if (table.cfg.omega_grid[static_cast<std::size_t>(r.omega_idx)] != a.omega) continue;
            if (table.cfg.lambda_grid[static_cast<std::size_t>(r.lambda_idx)] != a.lambda) continue;
            sum += r.value;
            ++n;
        }
        if (n != a.ok || (n > 0 && std::abs(sum / n - a.mean) > 1e-12 * std::max(1.0, std::abs(a.mean))))
            throw std::logic_error("emit_results: aggregate/per-trial mismatch");
    }
}

inline nlohmann::json config_echo_json(const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    std::stringstream ss(canonical_config_string(cfg));
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return j;
}

} // namespace detail

// Write the aggregate table (CSV or JSON) plus a JSON summary with the
// config echo, per-family optima, and failure counts. Filenames embed the
// config hash; identical configs rewrite byte-identical files.
inline std::vector<std::filesystem::path> emit_results(const ResultTable& table,
                                                       const std::string& format,
                                                       const std::filesystem::path& out_dir) {
    if (format != "csv" && format != "json")
        throw config_error("emit_results: format must be csv or json");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory", out_dir.string());

    const bool cap = is_capacity_task(table.cfg.task);
    const std::string base =
        std::string(task_name(table.cfg.task)) + "_" + config_hash(table.cfg);
    const auto aggs = table.aggregates();
    detail::verify_aggregates(table, aggs);

    const auto fam = [&](int idx) {
        return std::string(family_name(table.cfg.families[static_cast<std::size_t>(idx)]));
    };

    std::vector<std::filesystem::path> written;
    const std::filesystem::path results_path =
        out_dir / (base + "_results." + format);
    {
        std::ofstream out(results_path, std::ios::binary);
        if (!out) throw io_error("cannot open file for writing", results_path.string());
        if (format == "csv") {
            if (cap)
                out << "family,omega,lambda,order,tau,mc,mc_se,trials_ok,trials_failed\n";
            else
                out << "family,omega,lambda,horizon,nmse,nmse_se,log10_nmse,nmse_conventional,"
                       "trials_ok,trials_failed\n";
            for (const auto& a : aggs) {
                out << fam(a.family) << ',' << format_double(a.omega) << ','
                    << format_double(a.lambda) << ',';
                if (cap) {
                    out << a.order << ',' << a.tau << ',' << format_double(a.mean) << ','
                        << format_double(a.se) << ',' << a.ok << ',' << a.failed << '\n';
                } else {
                    const double log10v = a.ok > 0 && a.mean > 0.0 ? std::log10(a.mean)
                                                                   : std::numeric_limits<double>::quiet_NaN();
                    out << a.tau << ',' << format_double(a.mean) << ',' << format_double(a.se) << ','
                        << format_double(log10v) << ',' << format_double(a.mean_alt) << ','
                        << a.ok << ',' << a.failed << '\n';
                }
            }
        } else {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& a : aggs) {
                nlohmann::json r;
                r["family"] = fam(a.family);
                r["omega"] = a.omega;
                r["lambda"] = a.lambda;
                if (cap) {
                    r["order"] = a.order;
                    r["tau"] = a.tau;
                    r["mc"] = a.mean;
                    r["mc_se"] = a.se;
                } else {
                    r["horizon"] = a.tau;
                    r["nmse"] = a.mean;
                    r["nmse_se"] = a.se;
                    r["nmse_conventional"] = a.mean_alt;
                }
                r["trials_ok"] = a.ok;
                r["trials_failed"] = a.failed;
                rows.push_back(r);
            }
            out << rows.dump(2) << "\n";
        }
        if (!out) throw io_error("write failed", results_path.string());
    }
    written.push_back(results_path);

    // summary: config echo, per-family optima over the grid, failure counts
    nlohmann::json summary;
    summary["config"] = detail::config_echo_json(table.cfg);
    summary["config_hash"] = config_hash(table.cfg);
    summary["library_version"] = std::string(kLibraryVersion);
    summary["task"] = std::string(task_name(table.cfg.task));

    nlohmann::json families = nlohmann::json::object();
    for (std::size_t f = 0; f < table.cfg.families.size(); ++f) {
        nlohmann::json entry;
        int failed_trials = 0;
        for (const auto& it : table.items)
            if (it.family == static_cast<int>(f) && it.failed) ++failed_trials;
        entry["failed_trials"] = failed_trials;

        nlohmann::json best = nlohmann::json::object();
        // capacity: highest per-order total; prediction: lowest error per horizon
        std::map<int, const AggregateRow*> pick;
        for (const auto& a : aggs) {
            if (a.family != static_cast<int>(f) || a.ok == 0) continue;
            if (cap) {
                if (a.tau != -1) continue;
                const AggregateRow*& cur = pick[a.order];
                if (!cur || a.mean > cur->mean) cur = &a;
            } else {
                const AggregateRow*& cur = pick[a.tau];
                if (!cur || a.mean < cur->mean) cur = &a;
            }
        }
        for (const auto& [key, row] : pick) {
            nlohmann::json b;
            b["omega"] = row->omega;
            b["lambda"] = row->lambda;
            b["value"] = row->mean;
            best[std::to_string(key)] = b;
        }
        entry[cap ? "best_total_by_order" : "best_by_horizon"] = best;
        families[std::string(family_name(table.cfg.families[f]))] = entry;
    }
    summary["families"] = families;
    summary["fully_failed_cells"] = table.fully_failed_cells();

    const std::filesystem::path summary_path = out_dir / (base + "_summary.json");
    {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw io_error("cannot open file for writing", summary_path.string());
        out << summary.dump(2) << "\n";
        if (!out) throw io_error("write failed", summary_path.string());
    }
    written.push_back(summary_path);
    return written;
}

} // namespace prodres
