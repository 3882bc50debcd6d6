#pragma once

#include "asgh/adaptive.hpp"
#include "asgh/models.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace asgh {

// Combined error across components at one step: sqrt of the mean over
// columns of the per-column mean squared error. Rows are Monte Carlo
// runs, columns are state components.
double compute_err(const Eigen::MatrixXd& per_run_component_errors);

// Median of a sample (empty input throws).
double median(std::vector<double> values);

// --------------------------------------------------------------------------
// Quadrature comparison table
// --------------------------------------------------------------------------
struct Table1Row {
    std::string variant;
    int points = 0;
    double value = 0.0;
    double percent_error = 0.0;
};

struct Table1Report {
    int dimension = 6;
    double exact = 0.0;
    std::vector<Table1Row> rows;
};

// Full-tensor rules at 3..6 points per dimension, Smolyak levels 3..4 and
// three adaptive configurations on the sum-of-even-powers integrand, with
// percent error against the closed-form moment value.
Table1Report run_table1(int dimension = 6);

// table1.csv and table1.json under out_dir.
void write_table1(const Table1Report& report, const std::string& out_dir);

// --------------------------------------------------------------------------
// Monte Carlo filter studies
// --------------------------------------------------------------------------
struct ExperimentConfig {
    std::string problem;  // "sinusoids" or "tracking"
    int scenario = 1;
    int runs = 50;
    int steps = 0;  // 0 = problem default (500 sinusoids, 200 tracking)
    std::uint64_t seed = 1;
    double omega_deg = 3.0;  // tracking turn rate
    int ghf_points = 3;
    int sghf_level = 3;
    AdaptConfig asghf_process;
    AdaptConfig asghf_measurement;
    std::string out_dir;
    int threads = 0;  // 0 = ASGHF_THREADS env or hardware concurrency

    // Field defaults resolved for the chosen problem/scenario.
    static ExperimentConfig defaults(const std::string& problem, int scenario);
};

struct FilterMetrics {
    // Per-step series: ERR(frequency)/ERR(amplitude) for sinusoids,
    // RMSE(position)/RMSE(velocity) for tracking.
    std::vector<double> series_a;
    std::vector<double> series_b;
    std::vector<double> run_ms;  // wall clock per run
    double median_ms = 0.0;
    int process_grid_points = 0;
    int measurement_grid_points = 0;
    int failures = 0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<std::string> filter_names;  // ghf, sghf, asghf
    std::map<std::string, FilterMetrics> filters;
};

// Simulates one truth/measurement stream per run and feeds the identical
// stream to every filter. Runs execute in parallel; aggregation order is
// fixed by run index. Throws NumericalError if more than 10% of the runs
// of any filter diverge.
ExperimentResult run_sinusoids(const ExperimentConfig& config);
ExperimentResult run_tracking(const ExperimentConfig& config);

// Writes the per-step series (step column plus one column per filter) and
// timing.json with medians normalized to the GHF. File names:
// err_freq/err_amp for sinusoids, rmse_pos/rmse_vel for tracking.
void write_experiment(const ExperimentResult& result);

// Median wall-clock per filter normalized to "ghf" (or the first entry
// when no GHF ran), serialized as a JSON string.
std::string timing_report(const std::map<std::string, std::vector<double>>& run_ms_per_filter);

// Scenario constants shipped as JSON. Parses a config file and checks it
// against the built-in scenario constants; returns the resolved config.
ExperimentConfig load_scenario_file(const std::string& path);

}  // namespace asgh
