#pragma once

#include "asgh/adaptive.hpp"
#include "asgh/weighted_grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <variant>
#include <vector>

namespace asgh {

// Filter state: mean and covariance of a Gaussian belief.
struct GaussianBelief {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

// Additive-noise state-space model
//   x_k = process(x_{k-1}) + w_k,   w ~ N(0, Q)
//   y_k = measurement(x_k, k) + v_k, v ~ N(0, R)
// The measurement takes the step index so phase-dependent sensors fit the
// same interface. angular[i] marks measurement components whose residuals
// wrap to (-pi, pi].
struct StateSpaceModel {
    int state_dim = 0;
    int meas_dim = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> process;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> measurement;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    std::vector<bool> angular;  // empty means no angular components
};

// Which quadrature rule drives the filter.
struct FullTensorSource {
    int points_per_dim = 3;
};
struct SmolyakSource {
    int accuracy_level = 3;
};
struct AdaptiveSource {
    AdaptConfig process;
    AdaptConfig measurement;
    int readapt_every = 0;  // 0 = adapt once at initialization
};
using GridSource = std::variant<FullTensorSource, SmolyakSource, AdaptiveSource>;

// Lower-triangular S with S*S^T = cov. Retries with escalating jitter
// (1e-9 * trace/n, three times x10) before giving up with
// NotPositiveDefiniteError. A zero matrix factors to zero.
Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd& cov);

// Quadrature moment-matching prediction through the process model.
GaussianBelief predict(const GaussianBelief& belief, const StateSpaceModel& model,
                       const WeightedGrid& grid);

// Quadrature moment-matching measurement update at step k. Angular
// innovation components are wrapped before the gain is applied.
GaussianBelief update(const GaussianBelief& predicted, const Eigen::VectorXd& y,
                      const StateSpaceModel& model, int k, const WeightedGrid& grid);

struct FilterRun {
    std::vector<GaussianBelief> estimates;  // one per measurement, posterior
    int process_grid_points = 0;
    int measurement_grid_points = 0;
};

// Alternating predict/update over the measurement sequence. Tensor and
// Smolyak grids are built once from the state dimension. Adaptive grids
// are compiled at initialization from the standardized process and
// measurement integrands at the prior, then reused every step;
// readapt_every > 0 rebuilds them at that step interval from the current
// belief.
FilterRun run_filter(const StateSpaceModel& model, const std::vector<Eigen::VectorXd>& measurements,
                     const GaussianBelief& prior, const GridSource& source);

// Residual wrapping to (-pi, pi].
double wrap_angle(double angle);

}  // namespace asgh
