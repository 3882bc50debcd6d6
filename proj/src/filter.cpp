#include "asgh/filter.hpp"

#include "asgh/sparse_grid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asgh {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Quadrature rules with negative weights can hand back indefinite moment
// estimates on strongly nonlinear models. A covariance estimate must be
// positive semi-definite, so eigenvalues below a roundoff band are clamped
// to zero; healthy matrices pass through untouched.
Eigen::MatrixXd psd_conditioned(const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd sym = symmetrized(m);
    const double band = -1e-12 * (1.0 + std::abs(sym.trace()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() >= band) return sym;
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    return symmetrized(es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose());
}

// Transformed quadrature points chi_i = mean + S * xi_i for a grid in
// standard-normal space.
Eigen::MatrixXd transformed_points(const WeightedGrid& grid, const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& sqrt_cov) {
    const int n = grid.dimension();
    Eigen::MatrixXd chi(n, grid.size());
    Eigen::VectorXd xi(n);
    for (int i = 0; i < grid.size(); ++i) {
        auto p = grid.point(i);
        for (int j = 0; j < n; ++j) xi[j] = p[j];
        chi.col(i) = mean + sqrt_cov * xi;
    }
    return chi;
}

WeightedGrid grid_for(const GridSource& source, const StateSpaceModel& model,
                      const GaussianBelief& prior, bool for_measurement, int* out_points) {
    const int n = model.state_dim;
    WeightedGrid grid(n);
    if (const auto* tensor = std::get_if<FullTensorSource>(&source)) {
        grid = full_tensor_grid(n, tensor->points_per_dim);
    } else if (const auto* smolyak = std::get_if<SmolyakSource>(&source)) {
        grid = smolyak_grid(n, smolyak->accuracy_level);
    } else {
        const auto& adaptive = std::get<AdaptiveSource>(source);
        const Eigen::MatrixXd S = sqrt_factor(prior.cov);
        Integrand standardized;
        if (for_measurement) {
            standardized = [&](const Eigen::VectorXd& xi) {
                return model.measurement(prior.mean + S * xi, 1);
            };
        } else {
            standardized = [&](const Eigen::VectorXd& xi) { return model.process(prior.mean + S * xi); };
        }
        const AdaptConfig& cfg = for_measurement ? adaptive.measurement : adaptive.process;
        grid = adapt(standardized, n, cfg).compiled.grid;
    }
    if (out_points) *out_points = grid.size();
    return grid;
}

}  // namespace

double wrap_angle(double angle) {
    const double two_pi = 2.0 * std::numbers::pi;
    angle = std::fmod(angle, two_pi);
    if (angle <= -std::numbers::pi) angle += two_pi;
    if (angle > std::numbers::pi) angle -= two_pi;
    return angle;
}

Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("sqrt_factor: matrix must be square");
    const int n = static_cast<int>(cov.rows());

    const double trace = cov.trace();
    if (trace == 0.0 && cov.isZero(0.0)) return Eigen::MatrixXd::Zero(n, n);

    const Eigen::MatrixXd sym = symmetrized(cov);
    double jitter = 0.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Eigen::MatrixXd candidate = sym;
        if (attempt > 0) candidate += jitter * Eigen::MatrixXd::Identity(n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(candidate);
        if (llt.info() == Eigen::Success) return llt.matrixL();
        if (attempt == 0) {
            jitter = 1e-9 * trace / n;
            if (!(jitter > 0.0)) jitter = 1e-12;
        } else {
            jitter *= 10.0;
        }
    }
    throw NotPositiveDefiniteError("sqrt_factor: covariance not positive semi-definite", cov);
}

GaussianBelief predict(const GaussianBelief& belief, const StateSpaceModel& model,
                       const WeightedGrid& grid) {
    if (grid.dimension() != model.state_dim) {
        throw std::invalid_argument("predict: grid dimension does not match the state dimension");
    }
    const Eigen::MatrixXd S = sqrt_factor(belief.cov);
    const Eigen::MatrixXd chi = transformed_points(grid, belief.mean, S);

    Eigen::MatrixXd propagated(model.state_dim, grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        propagated.col(i) = model.process(chi.col(i));
        if (!propagated.col(i).allFinite()) {
            throw NumericalError("predict: process model returned a non-finite value");
        }
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.state_dim);
    for (int i = 0; i < grid.size(); ++i) mean += grid.weight(i) * propagated.col(i);

    Eigen::MatrixXd spread = Eigen::MatrixXd::Zero(model.state_dim, model.state_dim);
    for (int i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd d = propagated.col(i) - mean;
        spread += grid.weight(i) * (d * d.transpose());
    }
    return GaussianBelief{std::move(mean), symmetrized(psd_conditioned(spread) + model.Q)};
}

GaussianBelief update(const GaussianBelief& predicted, const Eigen::VectorXd& y,
                      const StateSpaceModel& model, int k, const WeightedGrid& grid) {
    if (grid.dimension() != model.state_dim) {
        throw std::invalid_argument("update: grid dimension does not match the state dimension");
    }
    const Eigen::MatrixXd S = sqrt_factor(predicted.cov);
    const Eigen::MatrixXd chi = transformed_points(grid, predicted.mean, S);

    Eigen::MatrixXd predicted_meas(model.meas_dim, grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        predicted_meas.col(i) = model.measurement(chi.col(i), k);
        if (!predicted_meas.col(i).allFinite()) {
            throw NumericalError("update: measurement model returned a non-finite value");
        }
    }

    Eigen::VectorXd y_hat = Eigen::VectorXd::Zero(model.meas_dim);
    for (int i = 0; i < grid.size(); ++i) y_hat += grid.weight(i) * predicted_meas.col(i);

    Eigen::MatrixXd meas_spread = Eigen::MatrixXd::Zero(model.meas_dim, model.meas_dim);
    Eigen::MatrixXd P_xy = Eigen::MatrixXd::Zero(model.state_dim, model.meas_dim);
    for (int i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd dy = predicted_meas.col(i) - y_hat;
        const Eigen::VectorXd dx = chi.col(i) - predicted.mean;
        meas_spread += grid.weight(i) * (dy * dy.transpose());
        P_xy += grid.weight(i) * (dx * dy.transpose());
    }

    // The moment-matched joint covariance of (x, y) must be positive
    // semi-definite; conditioning it jointly also keeps the cross block
    // consistent with the marginals, which bounds the gain.
    const int n = model.state_dim;
    const int p = model.meas_dim;
    Eigen::MatrixXd joint(n + p, n + p);
    joint.topLeftCorner(n, n) = predicted.cov;
    joint.topRightCorner(n, p) = P_xy;
    joint.bottomLeftCorner(p, n) = P_xy.transpose();
    joint.bottomRightCorner(p, p) = meas_spread;
    joint = psd_conditioned(joint);
    P_xy = joint.topRightCorner(n, p);
    const Eigen::MatrixXd P_yy = symmetrized(joint.bottomRightCorner(p, p) + model.R);

    // Gain via factorization; the same jitter ladder guards a singular
    // innovation covariance.
    Eigen::MatrixXd gain;
    {
        double jitter = 0.0;
        const double trace = P_yy.trace();
        bool solved = false;
        for (int attempt = 0; attempt <= 3 && !solved; ++attempt) {
            Eigen::MatrixXd candidate = P_yy;
            if (attempt > 0) candidate += jitter * Eigen::MatrixXd::Identity(model.meas_dim, model.meas_dim);
            Eigen::LLT<Eigen::MatrixXd> llt(candidate);
            if (llt.info() == Eigen::Success) {
                gain = llt.solve(P_xy.transpose()).transpose();
                solved = true;
            } else if (attempt == 0) {
                jitter = 1e-9 * trace / model.meas_dim;
                if (!(jitter > 0.0)) jitter = 1e-12;
            } else {
                jitter *= 10.0;
            }
        }
        if (!solved) {
            throw NotPositiveDefiniteError("update: innovation covariance is singular", P_yy);
        }
    }

    Eigen::VectorXd innovation = y - y_hat;
    if (!model.angular.empty()) {
        for (int i = 0; i < model.meas_dim; ++i) {
            if (model.angular[static_cast<std::size_t>(i)]) innovation[i] = wrap_angle(innovation[i]);
        }
    }

    GaussianBelief posterior;
    posterior.mean = predicted.mean + gain * innovation;
    posterior.cov = psd_conditioned(joint.topLeftCorner(n, n) - gain * P_yy * gain.transpose());
    return posterior;
}

FilterRun run_filter(const StateSpaceModel& model, const std::vector<Eigen::VectorXd>& measurements,
                     const GaussianBelief& prior, const GridSource& source) {
    FilterRun run;
    run.estimates.reserve(measurements.size());

    WeightedGrid process_grid = grid_for(source, model, prior, false, &run.process_grid_points);
    WeightedGrid measurement_grid = grid_for(source, model, prior, true, &run.measurement_grid_points);

    const auto* adaptive = std::get_if<AdaptiveSource>(&source);

    GaussianBelief belief = prior;
    int k = 0;
    for (const Eigen::VectorXd& y : measurements) {
        ++k;
        if (adaptive && adaptive->readapt_every > 0 && k > 1 &&
            (k - 1) % adaptive->readapt_every == 0) {
            process_grid = grid_for(source, model, belief, false, &run.process_grid_points);
            measurement_grid = grid_for(source, model, belief, true, &run.measurement_grid_points);
        }
        const GaussianBelief predicted = predict(belief, model, process_grid);
        belief = update(predicted, y, model, k, measurement_grid);
        run.estimates.push_back(belief);
    }
    return run;
}

}  // namespace asgh
