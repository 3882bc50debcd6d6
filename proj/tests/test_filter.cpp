#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asgh/filter.hpp"
#include "asgh/models.hpp"
#include "asgh/rng.hpp"
#include "asgh/sparse_grid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using asgh::FullTensorSource;
using asgh::GaussianBelief;
using asgh::SmolyakSource;
using asgh::StateSpaceModel;
using asgh::WeightedGrid;

namespace {

// Closed-form Kalman filter for x' = A x + b + w, y = H x + v.
struct KalmanOracle {
    Eigen::MatrixXd A, H, Q, R;
    Eigen::VectorXd b;

    GaussianBelief step(const GaussianBelief& belief, const Eigen::VectorXd& y) const {
        const Eigen::VectorXd m_pred = A * belief.mean + b;
        const Eigen::MatrixXd P_pred = A * belief.cov * A.transpose() + Q;
        const Eigen::MatrixXd S = H * P_pred * H.transpose() + R;
        const Eigen::MatrixXd K = P_pred * H.transpose() * S.inverse();
        GaussianBelief out;
        out.mean = m_pred + K * (y - H * m_pred);
        out.cov = P_pred - K * S * K.transpose();
        return out;
    }
};

StateSpaceModel linear_model(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             const Eigen::MatrixXd& H, const Eigen::MatrixXd& Q,
                             const Eigen::MatrixXd& R) {
    StateSpaceModel model;
    model.state_dim = static_cast<int>(A.rows());
    model.meas_dim = static_cast<int>(H.rows());
    model.process = [A, b](const Eigen::VectorXd& x) { return A * x + b; };
    model.measurement = [H](const Eigen::VectorXd& x, int) { return H * x; };
    model.Q = Q;
    model.R = R;
    return model;
}

}  // namespace

TEST_CASE("sqrt_factor basics") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    CHECK((asgh::sqrt_factor(eye) - eye).lpNorm<Eigen::Infinity>() <= 1e-14);

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 0.4;
    diag(1, 1) = 0.2;
    const Eigen::MatrixXd S = asgh::sqrt_factor(diag);
    CHECK(S(0, 0) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-14));
    CHECK(S(1, 1) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-14));
    CHECK(S(0, 1) == 0.0);

    CHECK(asgh::sqrt_factor(Eigen::MatrixXd::Zero(4, 4)).isZero(0.0));
}

TEST_CASE("sqrt_factor reconstructs random covariances") {
    std::mt19937 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd A(4, 4);
        for (int i = 0; i < 16; ++i) A(i / 4, i % 4) = normal(rng);
        const Eigen::MatrixXd cov = A * A.transpose();
        const Eigen::MatrixXd S = asgh::sqrt_factor(cov);
        CHECK((S * S.transpose() - cov).lpNorm<Eigen::Infinity>() < 1e-10);
        // Lower-triangular
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) CHECK(S(i, j) == 0.0);
        }
    }
}

TEST_CASE("sqrt_factor rejects indefinite matrices with the matrix attached") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(1, 1) = -1.0;
    try {
        asgh::sqrt_factor(bad);
        FAIL("expected NotPositiveDefiniteError");
    } catch (const asgh::NotPositiveDefiniteError& e) {
        CHECK(e.matrix()(1, 1) == -1.0);
    }
}

TEST_CASE("predict leaves the belief unchanged under the identity process") {
    StateSpaceModel model;
    model.state_dim = 3;
    model.meas_dim = 1;
    model.process = [](const Eigen::VectorXd& x) { return x; };
    model.Q = Eigen::MatrixXd::Zero(3, 3);

    GaussianBelief belief;
    belief.mean = (Eigen::VectorXd(3) << 1.0, -2.0, 0.5).finished();
    belief.cov = (Eigen::VectorXd(3) << 0.9, 0.4, 1.5).finished().asDiagonal();

    for (const WeightedGrid& grid : {asgh::full_tensor_grid(3, 3), asgh::smolyak_grid(3, 3)}) {
        const GaussianBelief out = asgh::predict(belief, model, grid);
        CHECK((out.mean - belief.mean).lpNorm<Eigen::Infinity>() <= 1e-10);
        CHECK((out.cov - belief.cov).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
}

TEST_CASE("predict matches the closed form for affine processes") {
    Eigen::MatrixXd A(2, 2);
    A << 0.9, 0.2, -0.1, 0.8;
    const Eigen::VectorXd b = (Eigen::VectorXd(2) << 0.3, -0.4).finished();
    Eigen::MatrixXd Q(2, 2);
    Q << 0.05, 0.01, 0.01, 0.04;

    StateSpaceModel model;
    model.state_dim = 2;
    model.meas_dim = 1;
    model.process = [&](const Eigen::VectorXd& x) { return A * x + b; };
    model.Q = Q;

    GaussianBelief belief;
    belief.mean = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
    belief.cov = (Eigen::MatrixXd(2, 2) << 0.5, 0.1, 0.1, 0.3).finished();

    const GaussianBelief out = asgh::predict(belief, model, asgh::smolyak_grid(2, 2));
    const Eigen::VectorXd mean_exact = A * belief.mean + b;
    const Eigen::MatrixXd cov_exact = A * belief.cov * A.transpose() + Q;
    CHECK((out.mean - mean_exact).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((out.cov - cov_exact).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("predict of a 1-D square through the 3-point rule") {
    StateSpaceModel model;
    model.state_dim = 1;
    model.meas_dim = 1;
    model.process = [](const Eigen::VectorXd& x) {
        return (Eigen::VectorXd(1) << x[0] * x[0]).finished();
    };
    model.Q = (Eigen::MatrixXd(1, 1) << 0.7).finished();

    GaussianBelief belief;
    belief.mean = Eigen::VectorXd::Zero(1);
    belief.cov = Eigen::MatrixXd::Identity(1, 1);

    const GaussianBelief out = asgh::predict(belief, model, asgh::full_tensor_grid(1, 3));
    CHECK(out.mean[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.cov(0, 0) == doctest::Approx(2.0 + 0.7).epsilon(1e-12));
}

TEST_CASE("uninformative measurements leave the belief almost unchanged") {
    StateSpaceModel model;
    model.state_dim = 2;
    model.meas_dim = 2;
    model.measurement = [](const Eigen::VectorXd& x, int) { return x; };
    model.R = 1e12 * Eigen::MatrixXd::Identity(2, 2);

    GaussianBelief predicted;
    predicted.mean = (Eigen::VectorXd(2) << 4.0, -1.0).finished();
    predicted.cov = (Eigen::MatrixXd(2, 2) << 1.0, 0.2, 0.2, 2.0).finished();

    const Eigen::VectorXd y = (Eigen::VectorXd(2) << 100.0, -50.0).finished();
    const GaussianBelief out =
        asgh::update(predicted, y, model, 1, asgh::full_tensor_grid(2, 3));
    CHECK((out.mean - predicted.mean).lpNorm<Eigen::Infinity>() /
              predicted.mean.lpNorm<Eigen::Infinity>() <=
          1e-4);
    CHECK((out.cov - predicted.cov).lpNorm<Eigen::Infinity>() / 2.0 <= 1e-4);
}

TEST_CASE("linear measurement update matches the Kalman form") {
    Eigen::MatrixXd H(1, 2);
    H << 1.0, 0.5;
    const Eigen::MatrixXd R = (Eigen::MatrixXd(1, 1) << 0.2).finished();

    StateSpaceModel model;
    model.state_dim = 2;
    model.meas_dim = 1;
    model.measurement = [H](const Eigen::VectorXd& x, int) { return H * x; };
    model.R = R;

    GaussianBelief predicted;
    predicted.mean = (Eigen::VectorXd(2) << 1.0, -1.0).finished();
    predicted.cov = (Eigen::MatrixXd(2, 2) << 0.8, 0.1, 0.1, 0.6).finished();

    const Eigen::VectorXd y = (Eigen::VectorXd(1) << 0.9).finished();
    const GaussianBelief out =
        asgh::update(predicted, y, model, 1, asgh::smolyak_grid(2, 3));

    const Eigen::MatrixXd S = H * predicted.cov * H.transpose() + R;
    const Eigen::MatrixXd K = predicted.cov * H.transpose() * S.inverse();
    const Eigen::VectorXd mean_exact = predicted.mean + K * (y - H * predicted.mean);
    const Eigen::MatrixXd cov_exact = predicted.cov - K * S * K.transpose();
    CHECK((out.mean - mean_exact).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((out.cov - cov_exact).lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("angular innovations wrap to the short way around") {
    const double deg = std::numbers::pi / 180.0;
    CHECK(asgh::wrap_angle(358.0 * deg) == doctest::Approx(-2.0 * deg).epsilon(1e-12));
    CHECK(asgh::wrap_angle(-358.0 * deg) == doctest::Approx(2.0 * deg).epsilon(1e-12));
    CHECK(asgh::wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));

    // Measured bearing +179 deg against a predicted -179 deg must nudge the
    // state down (wrapped innovation -2 deg), not up by +358 deg.
    StateSpaceModel model;
    model.state_dim = 1;
    model.meas_dim = 1;
    model.measurement = [deg](const Eigen::VectorXd& x, int) {
        return (Eigen::VectorXd(1) << -179.0 * deg + 0.01 * x[0]).finished();
    };
    model.R = (Eigen::MatrixXd(1, 1) << 1e-4).finished();
    model.angular = {true};

    GaussianBelief predicted;
    predicted.mean = Eigen::VectorXd::Zero(1);
    predicted.cov = Eigen::MatrixXd::Identity(1, 1);

    const Eigen::VectorXd y = (Eigen::VectorXd(1) << 179.0 * deg).finished();
    const GaussianBelief out =
        asgh::update(predicted, y, model, 1, asgh::full_tensor_grid(1, 3));
    CHECK(out.mean[0] < 0.0);
}

TEST_CASE("run_filter equals the Kalman oracle on a linear model") {
    std::mt19937 rng(5);
    std::normal_distribution<double> normal;

    Eigen::MatrixXd A(3, 3);
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = 0.3 * normal(rng);
    A += 0.6 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::VectorXd b = (Eigen::VectorXd(3) << 0.1, -0.2, 0.05).finished();
    Eigen::MatrixXd H(2, 3);
    for (int i = 0; i < 6; ++i) H(i / 3, i % 3) = normal(rng);
    Eigen::MatrixXd Qh(3, 3);
    for (int i = 0; i < 9; ++i) Qh(i / 3, i % 3) = 0.2 * normal(rng);
    const Eigen::MatrixXd Q = Qh * Qh.transpose() + 0.01 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd R = 0.3 * Eigen::MatrixXd::Identity(2, 2);

    StateSpaceModel model = linear_model(A, b, H, Q, R);
    const KalmanOracle oracle{A, H, Q, R, b};

    GaussianBelief prior;
    prior.mean = (Eigen::VectorXd(3) << 1.0, 0.0, -1.0).finished();
    prior.cov = Eigen::MatrixXd::Identity(3, 3);

    const asgh::Trajectory traj = simulate_truth(model, prior.mean, 30, 99);

    for (const asgh::GridSource source :
         {asgh::GridSource{FullTensorSource{3}}, asgh::GridSource{SmolyakSource{3}}}) {
        const asgh::FilterRun run = asgh::run_filter(model, traj.measurements, prior, source);
        GaussianBelief reference = prior;
        for (std::size_t k = 0; k < traj.measurements.size(); ++k) {
            reference = oracle.step(reference, traj.measurements[k]);
            CHECK((run.estimates[k].mean - reference.mean).lpNorm<Eigen::Infinity>() <= 1e-8);
            CHECK((run.estimates[k].cov - reference.cov).lpNorm<Eigen::Infinity>() <= 1e-8);

            // Information never negative: posterior trace below the
            // predicted trace.
            const GaussianBelief predicted =
                k == 0 ? GaussianBelief{A * prior.mean + b, A * prior.cov * A.transpose() + Q}
                       : GaussianBelief{A * run.estimates[k - 1].mean + b,
                                        A * run.estimates[k - 1].cov * A.transpose() + Q};
            CHECK(run.estimates[k].cov.trace() <= predicted.cov.trace() + 1e-9);

            // Emitted covariances stay symmetric positive semi-definite.
            CHECK((run.estimates[k].cov - run.estimates[k].cov.transpose())
                      .lpNorm<Eigen::Infinity>() <= 1e-9);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(run.estimates[k].cov);
            CHECK(es.eigenvalues().minCoeff() >= -1e-9);
        }
    }
}

TEST_CASE("zero-noise linear tracking is exact") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    A(0, 1) = 0.1;
    StateSpaceModel model = linear_model(A, Eigen::VectorXd::Zero(2),
                                         Eigen::MatrixXd::Identity(2, 2),
                                         Eigen::MatrixXd::Zero(2, 2),
                                         1e-12 * Eigen::MatrixXd::Identity(2, 2));

    GaussianBelief prior;
    prior.mean = (Eigen::VectorXd(2) << 1.0, -0.5).finished();
    prior.cov = 1e-12 * Eigen::MatrixXd::Identity(2, 2);

    Eigen::VectorXd truth = prior.mean;
    std::vector<Eigen::VectorXd> ys;
    for (int k = 0; k < 20; ++k) {
        truth = A * truth;
        ys.push_back(truth);
    }
    const asgh::FilterRun run =
        asgh::run_filter(model, ys, prior, asgh::GridSource{FullTensorSource{3}});
    truth = prior.mean;
    for (int k = 0; k < 20; ++k) {
        truth = A * truth;
        CHECK((run.estimates[static_cast<std::size_t>(k)].mean - truth).lpNorm<Eigen::Infinity>() <=
              1e-6);
    }
}

TEST_CASE("identical configuration gives bit-identical runs") {
    const asgh::CTParams params = asgh::CTParams::with_omega_deg(3.0);
    const StateSpaceModel model = asgh::coordinated_turn_model(params);
    const asgh::Trajectory traj = simulate_truth(model, params.initial_truth, 40, 7);

    GaussianBelief prior;
    prior.mean = params.initial_truth;
    prior.cov = params.p0_diagonal.asDiagonal();

    asgh::AdaptiveSource source;
    source.process.psi = 0.525;
    source.process.tol = 0.5;
    source.measurement.psi = 0.6;
    source.measurement.tol = 0.48;

    const asgh::FilterRun a = asgh::run_filter(model, traj.measurements, prior, source);
    const asgh::FilterRun b = asgh::run_filter(model, traj.measurements, prior, source);
    REQUIRE(a.estimates.size() == b.estimates.size());
    for (std::size_t k = 0; k < a.estimates.size(); ++k) {
        CHECK(a.estimates[k].mean == b.estimates[k].mean);
        CHECK(a.estimates[k].cov == b.estimates[k].cov);
    }
    CHECK(a.process_grid_points == b.process_grid_points);
    CHECK(a.measurement_grid_points == b.measurement_grid_points);
}

TEST_CASE("re-adaptation interval rebuilds grids during the run") {
    const asgh::CTParams params = asgh::CTParams::with_omega_deg(4.5);
    const StateSpaceModel model = asgh::coordinated_turn_model(params);
    const asgh::Trajectory traj = simulate_truth(model, params.initial_truth, 20, 3);

    GaussianBelief prior;
    prior.mean = params.initial_truth;
    prior.cov = params.p0_diagonal.asDiagonal();

    asgh::AdaptiveSource source;
    source.process.psi = 0.55;
    source.process.tol = 0.5;
    source.measurement.psi = 0.6;
    source.measurement.tol = 0.48;
    source.readapt_every = 5;

    const asgh::FilterRun run = asgh::run_filter(model, traj.measurements, prior, source);
    CHECK(run.estimates.size() == traj.measurements.size());
    for (const GaussianBelief& belief : run.estimates) CHECK(belief.mean.allFinite());
}

TEST_CASE("grid dimension mismatches are rejected") {
    StateSpaceModel model;
    model.state_dim = 2;
    model.meas_dim = 1;
    model.process = [](const Eigen::VectorXd& x) { return x; };
    model.Q = Eigen::MatrixXd::Zero(2, 2);

    GaussianBelief belief;
    belief.mean = Eigen::VectorXd::Zero(2);
    belief.cov = Eigen::MatrixXd::Identity(2, 2);

    CHECK_THROWS_AS(asgh::predict(belief, model, asgh::full_tensor_grid(3, 3)),
                    std::invalid_argument);
}
