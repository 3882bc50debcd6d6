// Command-line harness: quadrature comparison table, Monte Carlo filter
// studies on the sinusoid and coordinated-turn benchmarks, and ad-hoc
// Gaussian-weighted quadrature.

#include "asgh/adaptive.hpp"
#include "asgh/experiment.hpp"
#include "asgh/filter.hpp"
#include "asgh/models.hpp"
#include "asgh/sparse_grid.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitNumericalFailure = 3;

struct CommonFlags {
    int runs = 50;
    int steps = 0;
    std::uint64_t seed = 1;
    int scenario = 1;
    std::string out_dir = "out";
    double omega_deg = 3.0;
    int points = 3;
    int level = 3;
    double psi = -1.0;
    double tol = -1.0;
    int threads = 0;
    std::string config_file;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--runs", flags.runs, "Monte Carlo runs");
    cmd->add_option("--steps", flags.steps, "steps per run (0 = problem default)");
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--scenario", flags.scenario, "scenario id (1 or 2)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--points", flags.points, "univariate points per dimension for the GHF");
    cmd->add_option("--level", flags.level, "Smolyak accuracy level for the SGHF");
    cmd->add_option("--psi", flags.psi, "ASGHF error weighting override (both integrands)");
    cmd->add_option("--tol", flags.tol, "ASGHF tolerance override (both integrands)");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = auto)");
    cmd->add_option("--config", flags.config_file, "scenario config JSON file");
}

asgh::ExperimentConfig resolve_config(const std::string& problem, const CommonFlags& flags) {
    asgh::ExperimentConfig config =
        flags.config_file.empty() ? asgh::ExperimentConfig::defaults(problem, flags.scenario)
                                  : asgh::load_scenario_file(flags.config_file);
    config.runs = flags.runs;
    if (flags.steps > 0) config.steps = flags.steps;
    config.seed = flags.seed;
    config.omega_deg = flags.omega_deg;
    config.ghf_points = flags.points;
    config.sghf_level = flags.level;
    if (flags.psi >= 0.0) {
        config.asghf_process.psi = flags.psi;
        config.asghf_measurement.psi = flags.psi;
    }
    if (flags.tol > 0.0) {
        config.asghf_process.tol = flags.tol;
        config.asghf_measurement.tol = flags.tol;
    }
    config.out_dir = flags.out_dir;
    config.threads = flags.threads;
    return config;
}

void print_summary(const asgh::ExperimentResult& result) {
    for (const std::string& name : result.filter_names) {
        const asgh::FilterMetrics& m = result.filters.at(name);
        const std::size_t steps = m.series_a.size();
        const std::size_t tail = std::min<std::size_t>(100, steps);
        double a = 0.0;
        double b = 0.0;
        for (std::size_t k = steps - tail; k < steps; ++k) {
            a += m.series_a[k];
            b += m.series_b[k];
        }
        std::printf("%-6s median %8.2f ms  grid %d/%d pts  steady-state %.6g / %.6g  failures %d\n",
                    name.c_str(), m.median_ms, m.process_grid_points, m.measurement_grid_points,
                    a / tail, b / tail, m.failures);
    }
}

int run_quad(const std::string& filter, const std::string& integrand_name, int dim,
             const CommonFlags& flags, const std::string& grid_dump) {
    asgh::Integrand integrand;
    double exact = 0.0;
    bool has_exact = false;
    if (integrand_name == "sum-even-powers") {
        integrand = [](const Eigen::VectorXd& x) {
            return (Eigen::VectorXd(1) << asgh::sum_even_powers(x)).finished();
        };
        for (int i = 1; i <= dim; ++i) exact += asgh::gaussian_moment(2 * i);
        has_exact = true;
    } else if (integrand_name == "exp-marginals") {
        // (e^-x1, e^-x2^2, ..., alternating): smooth non-polynomial probe.
        integrand = [dim](const Eigen::VectorXd& x) {
            Eigen::VectorXd out(dim);
            for (int i = 0; i < dim; ++i) {
                out[i] = (i % 2 == 0) ? std::exp(-x[i]) : std::exp(-x[i] * x[i]);
            }
            return out;
        };
    } else {
        std::cerr << "unknown integrand: " << integrand_name << '\n';
        return kExitInvalidConfig;
    }

    Eigen::VectorXd value;
    int points = 0;
    if (filter == "ghf") {
        const asgh::WeightedGrid grid = asgh::full_tensor_grid(dim, flags.points);
        value = asgh::apply_grid(grid, integrand);
        points = grid.size();
    } else if (filter == "sghf") {
        const asgh::WeightedGrid grid = asgh::smolyak_grid(dim, flags.level);
        value = asgh::apply_grid(grid, integrand);
        points = grid.size();
    } else if (filter == "asghf") {
        asgh::AdaptConfig cfg;
        if (flags.psi >= 0.0) cfg.psi = flags.psi;
        if (flags.tol > 0.0) cfg.tol = flags.tol;
        const asgh::AdaptResult result = asgh::adapt(integrand, dim, cfg);
        value = result.state.running_integral;
        points = result.report.point_count;
        if (!grid_dump.empty()) {
            asgh::write_compiled_grid(result, cfg, grid_dump + ".csv", grid_dump + ".json");
        }
    } else {
        std::cerr << "unknown filter: " << filter << '\n';
        return kExitInvalidConfig;
    }

    nlohmann::json out{{"integrand", integrand_name}, {"dimension", dim}, {"points", points}};
    out["value"] = std::vector<double>(value.data(), value.data() + value.size());
    if (has_exact) {
        out["exact"] = exact;
        out["percent_error"] = 100.0 * std::abs(value[0] - exact) / exact;
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauss-Hermite, sparse-grid and dimension-adaptive quadrature filters"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string filter = "asghf";
    std::string integrand_name = "sum-even-powers";
    int dim = 6;
    std::string grid_dump;

    CLI::App* table1 = app.add_subcommand("table1", "quadrature comparison table (dimension 6)");
    table1->add_option("--out", flags.out_dir, "output directory");

    CLI::App* sinusoids =
        app.add_subcommand("sinusoids", "superimposed-sinusoid benchmark (GHF/SGHF/ASGHF)");
    add_common(sinusoids, flags);

    CLI::App* tracking =
        app.add_subcommand("tracking", "coordinated-turn benchmark (GHF/SGHF/ASGHF)");
    add_common(tracking, flags);
    tracking->add_option("--omega-deg", flags.omega_deg, "turn rate in degrees per second");

    CLI::App* quad = app.add_subcommand("quad", "one-off Gaussian-weighted quadrature");
    quad->add_option("--filter", filter, "rule family: ghf, sghf or asghf");
    quad->add_option("--integrand", integrand_name, "sum-even-powers or exp-marginals");
    quad->add_option("--dim", dim, "dimension");
    quad->add_option("--points", flags.points, "points per dimension (ghf)");
    quad->add_option("--level", flags.level, "accuracy level (sghf)");
    quad->add_option("--psi", flags.psi, "error weighting (asghf)");
    quad->add_option("--tol", flags.tol, "tolerance (asghf)");
    quad->add_option("--dump-grid", grid_dump, "basename for compiled grid CSV/JSON (asghf)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        if (table1->parsed()) {
            const asgh::Table1Report report = asgh::run_table1();
            asgh::write_table1(report, flags.out_dir);
            for (const asgh::Table1Row& row : report.rows) {
                std::printf("%-14s %6d pts  value %14.4f  error %.6f%%\n", row.variant.c_str(),
                            row.points, row.value, row.percent_error);
            }
            return kExitOk;
        }
        if (sinusoids->parsed()) {
            asgh::ExperimentResult result = asgh::run_sinusoids(resolve_config("sinusoids", flags));
            asgh::write_experiment(result);
            print_summary(result);
            return kExitOk;
        }
        if (tracking->parsed()) {
            asgh::ExperimentResult result = asgh::run_tracking(resolve_config("tracking", flags));
            asgh::write_experiment(result);
            print_summary(result);
            return kExitOk;
        }
        if (quad->parsed()) {
            return run_quad(filter, integrand_name, dim, flags, grid_dump);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const asgh::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
    return kExitOk;
}
