#include "asgh/experiment.hpp"

#include "asgh/filter.hpp"
#include "asgh/rng.hpp"
#include "asgh/sparse_grid.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace asgh {

namespace {

using nlohmann::json;

constexpr std::uint64_t kPriorSalt = 0x70726972ull;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ASGHF_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json config_to_json(const ExperimentConfig& c) {
    return json{
        {"problem", c.problem},
        {"scenario", c.scenario},
        {"runs", c.runs},
        {"steps", c.steps},
        {"seed", c.seed},
        {"omega_deg", c.omega_deg},
        {"ghf_points", c.ghf_points},
        {"sghf_level", c.sghf_level},
        {"asghf",
         {{"process", {{"psi", c.asghf_process.psi}, {"tol", c.asghf_process.tol}}},
          {"measurement", {{"psi", c.asghf_measurement.psi}, {"tol", c.asghf_measurement.tol}}}}},
        {"threads", c.threads},
        {"out_dir", c.out_dir},
    };
}

}  // namespace

double compute_err(const Eigen::MatrixXd& per_run_component_errors) {
    const auto runs = per_run_component_errors.rows();
    const auto comps = per_run_component_errors.cols();
    if (runs < 1 || comps < 1) {
        throw std::invalid_argument("compute_err: need at least one run and one component");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < comps; ++i) {
        total += per_run_component_errors.col(i).squaredNorm() / static_cast<double>(runs);
    }
    return std::sqrt(total / static_cast<double>(comps));
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

// ---------------------------------------------------------------------------
// Quadrature table
// ---------------------------------------------------------------------------

Table1Report run_table1(int dimension) {
    Table1Report report;
    report.dimension = dimension;
    for (int i = 1; i <= dimension; ++i) report.exact += gaussian_moment(2 * i);

    const Integrand integrand = [](const Eigen::VectorXd& x) {
        return (Eigen::VectorXd(1) << sum_even_powers(x)).finished();
    };
    auto percent_error = [&](double value) {
        return 100.0 * std::abs(value - report.exact) / report.exact;
    };

    for (int t = 3; t <= 6; ++t) {
        const WeightedGrid grid = full_tensor_grid(dimension, t);
        const double value = apply_grid(grid, integrand)[0];
        report.rows.push_back({"gh_" + std::to_string(t), grid.size(), value, percent_error(value)});
    }
    for (int level = 3; level <= 4; ++level) {
        const WeightedGrid grid = smolyak_grid(dimension, level);
        const double value = apply_grid(grid, integrand)[0];
        report.rows.push_back(
            {"sgh_" + std::to_string(level), grid.size(), value, percent_error(value)});
    }

    const std::array<std::pair<double, double>, 3> adaptive_configs{
        {{0.1, 5.0}, {0.4, 5.0}, {0.4, 1.6}}};
    for (const auto& [psi, tol] : adaptive_configs) {
        AdaptConfig cfg;
        cfg.psi = psi;
        cfg.tol = tol;
        const AdaptResult result = adapt(integrand, dimension, cfg);
        const double value = result.state.running_integral[0];
        std::ostringstream name;
        name << "asgh_" << psi << "_" << tol;
        report.rows.push_back(
            {name.str(), result.report.point_count, value, percent_error(value)});
    }
    return report;
}

void write_table1(const Table1Report& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);

    std::ofstream csv(out_dir + "/table1.csv");
    if (!csv) throw std::runtime_error("write_table1: cannot open table1.csv");
    csv << "variant,points,value,percent_error\n";
    for (const Table1Row& row : report.rows) {
        csv << row.variant << ',' << row.points << ',' << format_double(row.value) << ','
            << format_double(row.percent_error) << '\n';
    }

    json j{{"dimension", report.dimension}, {"exact", report.exact}, {"rows", json::array()}};
    for (const Table1Row& row : report.rows) {
        j["rows"].push_back({{"variant", row.variant},
                             {"points", row.points},
                             {"value", row.value},
                             {"percent_error", row.percent_error}});
    }
    std::ofstream jf(out_dir + "/table1.json");
    if (!jf) throw std::runtime_error("write_table1: cannot open table1.json");
    jf << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Monte Carlo engine
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults(const std::string& problem, int scenario) {
    ExperimentConfig c;
    c.problem = problem;
    c.scenario = scenario;
    if (problem == "sinusoids") {
        c.steps = 500;
        c.asghf_process.psi = 0.6;
        c.asghf_process.tol = 0.53;
        c.asghf_measurement.psi = 0.5;
        c.asghf_measurement.tol = 0.6655;
    } else if (problem == "tracking") {
        c.steps = 200;
        c.asghf_process.psi = scenario == 1 ? 0.55 : 0.525;
        c.asghf_process.tol = 0.5;
        c.asghf_measurement.psi = 0.6;
        c.asghf_measurement.tol = 0.48;
    } else {
        throw std::invalid_argument("ExperimentConfig::defaults: unknown problem " + problem);
    }
    return c;
}

namespace {

struct RunFilterOutput {
    bool failed = false;
    double ms = 0.0;
    int process_points = 0;
    int measurement_points = 0;
    // Per step: the two squared-error sums feeding the metric series.
    std::vector<std::array<double, 2>> squared;
};

struct RunOutput {
    std::vector<RunFilterOutput> per_filter;
};

struct ProblemAdapter {
    StateSpaceModel model;
    Eigen::VectorXd truth0;
    bool random_prior_mean = false;  // draw the initial estimate from N(truth0, P0)
    Eigen::VectorXd fixed_prior_mean;
    Eigen::VectorXd p0_diagonal;
    // Squared contributions of one (truth, estimate) pair.
    std::function<std::array<double, 2>(const Eigen::VectorXd&, const Eigen::VectorXd&)> squared_errors;
    double component_divisor_a = 1.0;
    double component_divisor_b = 1.0;
    std::string series_a_name;
    std::string series_b_name;
};

ExperimentResult run_monte_carlo(const ExperimentConfig& config, const ProblemAdapter& adapter) {
    if (config.runs < 1 || config.steps < 1) {
        throw std::invalid_argument("run_monte_carlo: runs and steps must be >= 1");
    }

    const std::vector<std::pair<std::string, GridSource>> filter_setups{
        {"ghf", FullTensorSource{config.ghf_points}},
        {"sghf", SmolyakSource{config.sghf_level}},
        {"asghf", AdaptiveSource{config.asghf_process, config.asghf_measurement}},
    };

    std::vector<RunOutput> outputs(static_cast<std::size_t>(config.runs));
    std::atomic<int> next_run{0};
    std::vector<std::exception_ptr> worker_errors(static_cast<std::size_t>(config.runs));

    auto worker = [&]() {
        for (;;) {
            const int run = next_run.fetch_add(1);
            if (run >= config.runs) return;
            try {
                const Trajectory trajectory = simulate_truth(
                    adapter.model, adapter.truth0, config.steps, config.seed,
                    static_cast<std::uint64_t>(run));

                GaussianBelief prior;
                prior.cov = adapter.p0_diagonal.asDiagonal();
                if (adapter.random_prior_mean) {
                    GaussianStream stream(config.seed ^ kPriorSalt, static_cast<std::uint64_t>(run));
                    prior.mean = adapter.truth0 +
                                 adapter.p0_diagonal.cwiseSqrt().asDiagonal() *
                                     stream.normal_vector(adapter.model.state_dim);
                } else {
                    prior.mean = adapter.fixed_prior_mean;
                }

                RunOutput& out = outputs[static_cast<std::size_t>(run)];
                out.per_filter.resize(filter_setups.size());
                for (std::size_t fi = 0; fi < filter_setups.size(); ++fi) {
                    RunFilterOutput& fo = out.per_filter[fi];
                    fo.squared.assign(static_cast<std::size_t>(config.steps), {0.0, 0.0});
                    try {
                        const auto t0 = std::chrono::steady_clock::now();
                        const FilterRun result = run_filter(adapter.model, trajectory.measurements,
                                                            prior, filter_setups[fi].second);
                        const auto t1 = std::chrono::steady_clock::now();
                        fo.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                        fo.process_points = result.process_grid_points;
                        fo.measurement_points = result.measurement_grid_points;
                        for (int k = 0; k < config.steps; ++k) {
                            const Eigen::VectorXd& estimate =
                                result.estimates[static_cast<std::size_t>(k)].mean;
                            if (!estimate.allFinite()) throw NumericalError("non-finite estimate");
                            fo.squared[static_cast<std::size_t>(k)] = adapter.squared_errors(
                                trajectory.states[static_cast<std::size_t>(k)], estimate);
                        }
                    } catch (const NumericalError&) {
                        fo.failed = true;
                    } catch (const NotPositiveDefiniteError&) {
                        fo.failed = true;
                    }
                }
            } catch (...) {
                worker_errors[static_cast<std::size_t>(run)] = std::current_exception();
                return;
            }
        }
    };

    const int thread_count = std::min(resolve_threads(config.threads), config.runs);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : worker_errors) {
        if (e) std::rethrow_exception(e);
    }

    // Deterministic aggregation in run order.
    ExperimentResult result;
    result.config = config;
    for (std::size_t fi = 0; fi < filter_setups.size(); ++fi) {
        const std::string& name = filter_setups[fi].first;
        result.filter_names.push_back(name);
        FilterMetrics metrics;

        int effective_runs = 0;
        for (int run = 0; run < config.runs; ++run) {
            const RunFilterOutput& fo = outputs[static_cast<std::size_t>(run)].per_filter[fi];
            if (fo.failed) {
                ++metrics.failures;
                continue;
            }
            ++effective_runs;
            metrics.run_ms.push_back(fo.ms);
            metrics.process_grid_points = fo.process_points;
            metrics.measurement_grid_points = fo.measurement_points;
        }
        if (metrics.failures * 10 > config.runs) {
            throw NumericalError("run_monte_carlo: filter " + name + " diverged in " +
                                 std::to_string(metrics.failures) + " of " +
                                 std::to_string(config.runs) + " runs");
        }

        metrics.series_a.assign(static_cast<std::size_t>(config.steps), 0.0);
        metrics.series_b.assign(static_cast<std::size_t>(config.steps), 0.0);
        for (int run = 0; run < config.runs; ++run) {
            const RunFilterOutput& fo = outputs[static_cast<std::size_t>(run)].per_filter[fi];
            if (fo.failed) continue;
            for (int k = 0; k < config.steps; ++k) {
                metrics.series_a[static_cast<std::size_t>(k)] += fo.squared[static_cast<std::size_t>(k)][0];
                metrics.series_b[static_cast<std::size_t>(k)] += fo.squared[static_cast<std::size_t>(k)][1];
            }
        }
        const double denom_a = adapter.component_divisor_a * std::max(effective_runs, 1);
        const double denom_b = adapter.component_divisor_b * std::max(effective_runs, 1);
        for (int k = 0; k < config.steps; ++k) {
            metrics.series_a[static_cast<std::size_t>(k)] =
                std::sqrt(metrics.series_a[static_cast<std::size_t>(k)] / denom_a);
            metrics.series_b[static_cast<std::size_t>(k)] =
                std::sqrt(metrics.series_b[static_cast<std::size_t>(k)] / denom_b);
        }
        if (!metrics.run_ms.empty()) metrics.median_ms = median(metrics.run_ms);
        result.filters[name] = std::move(metrics);
    }
    return result;
}

}  // namespace

ExperimentResult run_sinusoids(const ExperimentConfig& config) {
    if (config.scenario != 1 && config.scenario != 2) {
        throw std::invalid_argument("run_sinusoids: scenario must be 1 or 2");
    }
    const SinusoidParams params = SinusoidParams::scenario(config.scenario);

    ProblemAdapter adapter;
    adapter.model = sinusoid_model(params);
    adapter.truth0 = params.initial_truth;
    adapter.fixed_prior_mean = params.initial_estimate;
    adapter.p0_diagonal = params.p0_diagonal;
    adapter.squared_errors = [](const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
        std::array<double, 2> out{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const double df = truth[i] - estimate[i];
            const double da = truth[3 + i] - estimate[3 + i];
            out[0] += df * df;
            out[1] += da * da;
        }
        return out;
    };
    adapter.component_divisor_a = 3.0;
    adapter.component_divisor_b = 3.0;
    adapter.series_a_name = "err_freq";
    adapter.series_b_name = "err_amp";
    ExperimentResult result = run_monte_carlo(config, adapter);
    return result;
}

ExperimentResult run_tracking(const ExperimentConfig& config) {
    if (config.scenario != 1 && config.scenario != 2) {
        throw std::invalid_argument("run_tracking: scenario must be 1 or 2");
    }
    const CTParams params = CTParams::with_omega_deg(config.omega_deg);

    ProblemAdapter adapter;
    adapter.model = coordinated_turn_model(params);
    adapter.truth0 = params.initial_truth;
    adapter.random_prior_mean = true;
    adapter.p0_diagonal = params.p0_diagonal;
    adapter.squared_errors = [](const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
        const double dx = truth[0] - estimate[0];
        const double dy = truth[2] - estimate[2];
        const double dvx = truth[1] - estimate[1];
        const double dvy = truth[3] - estimate[3];
        return std::array<double, 2>{dx * dx + dy * dy, dvx * dvx + dvy * dvy};
    };
    adapter.component_divisor_a = 1.0;
    adapter.component_divisor_b = 1.0;
    adapter.series_a_name = "rmse_pos";
    adapter.series_b_name = "rmse_vel";
    return run_monte_carlo(config, adapter);
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

namespace {

void write_series_csv(const std::string& path, const ExperimentResult& result, bool first_series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_experiment: cannot open " + path);
    os << "step";
    for (const std::string& name : result.filter_names) os << ',' << name;
    os << '\n';
    for (int k = 0; k < result.config.steps; ++k) {
        os << (k + 1);
        for (const std::string& name : result.filter_names) {
            const FilterMetrics& m = result.filters.at(name);
            const double v = first_series ? m.series_a[static_cast<std::size_t>(k)]
                                          : m.series_b[static_cast<std::size_t>(k)];
            os << ',' << format_double(v);
        }
        os << '\n';
    }
}

}  // namespace

void write_experiment(const ExperimentResult& result) {
    const std::string& dir = result.config.out_dir;
    std::filesystem::create_directories(dir);

    const bool sinusoids = result.config.problem == "sinusoids";
    write_series_csv(dir + (sinusoids ? "/err_freq.csv" : "/rmse_pos.csv"), result, true);
    write_series_csv(dir + (sinusoids ? "/err_amp.csv" : "/rmse_vel.csv"), result, false);

    std::map<std::string, std::vector<double>> run_ms;
    for (const std::string& name : result.filter_names) {
        run_ms[name] = result.filters.at(name).run_ms;
    }
    json timing = json::parse(timing_report(run_ms));
    timing["config"] = config_to_json(result.config);
    for (const std::string& name : result.filter_names) {
        const FilterMetrics& m = result.filters.at(name);
        timing["filters"][name] = {
            {"process_grid_points", m.process_grid_points},
            {"measurement_grid_points", m.measurement_grid_points},
            {"failures", m.failures},
        };
    }
    std::ofstream os(dir + "/timing.json");
    if (!os) throw std::runtime_error("write_experiment: cannot open timing.json");
    os << timing.dump(2) << '\n';
}

std::string timing_report(const std::map<std::string, std::vector<double>>& run_ms_per_filter) {
    if (run_ms_per_filter.empty()) throw std::invalid_argument("timing_report: no filters");
    std::map<std::string, double> medians;
    for (const auto& [name, times] : run_ms_per_filter) medians[name] = median(times);
    const double reference =
        medians.contains("ghf") ? medians.at("ghf") : medians.begin()->second;

    json jm, jr;
    for (const auto& [name, med] : medians) {
        jm[name] = med;
        jr[name] = reference > 0.0 ? med / reference : 0.0;
    }
    return json{{"median_ms", jm}, {"relative", jr}}.dump();
}

// ---------------------------------------------------------------------------
// Scenario config files
// ---------------------------------------------------------------------------

ExperimentConfig load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_scenario_file: cannot open " + path);
    json j;
    is >> j;

    const std::string problem = j.at("problem").get<std::string>();
    const int scenario = j.at("scenario").get<int>();
    ExperimentConfig config = ExperimentConfig::defaults(problem, scenario);

    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) {
            throw std::runtime_error("load_scenario_file: " + path + ": " + what +
                                     " differs from the built-in scenario constants");
        }
    };

    const json& model = j.at("model");
    if (problem == "sinusoids") {
        const SinusoidParams p = SinusoidParams::scenario(scenario);
        expect(model.at("sampling_s").get<double>() == p.sampling_s, "sampling_s");
        expect(model.at("sigma_f2").get<double>() == p.sigma_f2, "sigma_f2");
        expect(model.at("sigma_a2").get<double>() == p.sigma_a2, "sigma_a2");
        expect(model.at("sigma_n2").get<double>() == p.sigma_n2, "sigma_n2");
        for (int i = 0; i < 6; ++i) {
            expect(model.at("initial_truth")[i].get<double>() == p.initial_truth[i], "initial_truth");
            expect(model.at("initial_estimate")[i].get<double>() == p.initial_estimate[i],
                   "initial_estimate");
            expect(model.at("p0_diagonal")[i].get<double>() == p.p0_diagonal[i], "p0_diagonal");
        }
    } else {
        const CTParams p = CTParams::with_omega_deg(config.omega_deg);
        expect(model.at("sampling_s").get<double>() == p.sampling_s, "sampling_s");
        expect(model.at("q").get<double>() == p.q, "q");
        expect(model.at("sigma_range_m").get<double>() == p.sigma_range_m, "sigma_range_m");
        expect(model.at("sigma_bearing2").get<double>() == p.sigma_bearing2, "sigma_bearing2");
    }

    const json& filters = j.at("filters");
    config.ghf_points = filters.at("ghf_points").get<int>();
    config.sghf_level = filters.at("sghf_level").get<int>();
    const json& asghf = filters.at("asghf");
    config.asghf_process.psi = asghf.at("process").at("psi").get<double>();
    config.asghf_process.tol = asghf.at("process").at("tol").get<double>();
    config.asghf_measurement.psi = asghf.at("measurement").at("psi").get<double>();
    config.asghf_measurement.tol = asghf.at("measurement").at("tol").get<double>();

    if (j.contains("runs")) config.runs = j.at("runs").get<int>();
    if (j.contains("steps")) config.steps = j.at("steps").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("omega_deg")) config.omega_deg = j.at("omega_deg").get<double>();
    return config;
}

}  // namespace asgh
