#include "asgh/models.hpp"

#include "asgh/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asgh {

double sum_even_powers(const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        sum += std::pow(x[i], 2.0 * (i + 1));
    }
    return sum;
}

double gaussian_moment(int k) {
    if (k < 0) throw std::invalid_argument("gaussian_moment: order must be >= 0");
    if (k % 2 == 1) return 0.0;
    double value = 1.0;
    for (int j = k - 1; j > 1; j -= 2) value *= j;
    return value;
}

// ---------------------------------------------------------------------------
// Sinusoids
// ---------------------------------------------------------------------------

// The published process-noise figures carry micro prefixes (151 uHz^2,
// 80 uV^2 per squared sampling interval); the measurement variance is
// plain V^2. Dropping the prefix would let the truth random-walk across
// the full frequency band within a run and no filter could track it.
SinusoidParams SinusoidParams::scenario(int id) {
    SinusoidParams p;
    p.initial_truth = (Eigen::VectorXd(6) << 200, 1000, 2000, 5, 4, 3).finished();
    p.initial_estimate = (Eigen::VectorXd(6) << 150, 900, 1800, 4, 4, 2).finished();
    if (id == 1) {
        p.sigma_f2 = 151e-6;
        p.sigma_a2 = 80e-6;
        p.sigma_n2 = 0.09;
        p.p0_diagonal = (Eigen::VectorXd(6) << 400, 400, 400, 0.05, 0.05, 0.05).finished();
    } else if (id == 2) {
        p.sigma_f2 = 300e-6;
        p.sigma_a2 = 160e-6;
        p.sigma_n2 = 0.18;
        p.p0_diagonal = (Eigen::VectorXd(6) << 2500, 2500, 2500, 0.5, 0.5, 0.5).finished();
    } else {
        throw std::invalid_argument("SinusoidParams::scenario: id must be 1 or 2");
    }
    return p;
}

StateSpaceModel sinusoid_model(const SinusoidParams& params) {
    StateSpaceModel model;
    model.state_dim = 6;
    model.meas_dim = 2;
    model.process = [](const Eigen::VectorXd& x) { return x; };

    const double T = params.sampling_s;
    model.measurement = [T](const Eigen::VectorXd& x, int k) {
        const double phase_scale = 2.0 * std::numbers::pi * k * T;
        double in_phase = 0.0;
        double quadrature = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double phase = phase_scale * x[j];
            in_phase += x[3 + j] * std::cos(phase);
            quadrature += x[3 + j] * std::sin(phase);
        }
        return (Eigen::VectorXd(2) << in_phase, quadrature).finished();
    };

    Eigen::VectorXd q_diag(6);
    q_diag << params.sigma_f2, params.sigma_f2, params.sigma_f2, params.sigma_a2, params.sigma_a2,
        params.sigma_a2;
    model.Q = q_diag.asDiagonal();
    model.R = Eigen::Vector2d(params.sigma_n2, params.sigma_n2).asDiagonal();
    return model;
}

// ---------------------------------------------------------------------------
// Coordinated turn
// ---------------------------------------------------------------------------

CTParams CTParams::with_omega_deg(double omega_deg) {
    CTParams p;
    p.omega_rad_s = omega_deg * std::numbers::pi / 180.0;
    p.initial_truth = (Eigen::VectorXd(5) << 1000, 30, 1000, 0, p.omega_rad_s).finished();
    p.p0_diagonal = (Eigen::VectorXd(5) << 200, 20, 200, 20, 100e-6).finished();
    return p;
}

Eigen::VectorXd ct_transition(const Eigen::VectorXd& x, double sampling_s) {
    const double T = sampling_s;
    const double omega = x[4];

    double sin_over, one_minus_cos_over;
    if (std::abs(omega) < 1e-8) {
        sin_over = T;
        one_minus_cos_over = 0.0;
    } else {
        sin_over = std::sin(omega * T) / omega;
        one_minus_cos_over = (1.0 - std::cos(omega * T)) / omega;
    }
    const double c = std::cos(omega * T);
    const double s = std::sin(omega * T);

    Eigen::VectorXd out(5);
    out[0] = x[0] + sin_over * x[1] - one_minus_cos_over * x[3];
    out[1] = c * x[1] - s * x[3];
    out[2] = one_minus_cos_over * x[1] + x[2] + sin_over * x[3];
    out[3] = s * x[1] + c * x[3];
    out[4] = omega;
    return out;
}

Eigen::VectorXd ct_measurement(const Eigen::VectorXd& x) {
    const double px = x[0];
    const double py = x[2];
    if (px == 0.0 && py == 0.0) {
        throw NumericalError("ct_measurement: bearing undefined at the origin");
    }
    return (Eigen::VectorXd(2) << std::sqrt(px * px + py * py), std::atan2(py, px)).finished();
}

Eigen::MatrixXd ct_process_noise(double sampling_s, double q) {
    const double T = sampling_s;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(5, 5);
    const double t3 = T * T * T / 3.0;
    const double t2 = T * T / 2.0;
    Q(0, 0) = t3;
    Q(0, 1) = t2;
    Q(1, 0) = t2;
    Q(1, 1) = T;
    Q(2, 2) = t3;
    Q(2, 3) = t2;
    Q(3, 2) = t2;
    Q(3, 3) = T;
    Q(4, 4) = 0.009 * T;
    return q * Q;
}

StateSpaceModel coordinated_turn_model(const CTParams& params) {
    StateSpaceModel model;
    model.state_dim = 5;
    model.meas_dim = 2;
    const double T = params.sampling_s;
    model.process = [T](const Eigen::VectorXd& x) { return ct_transition(x, T); };
    model.measurement = [](const Eigen::VectorXd& x, int) { return ct_measurement(x); };
    model.Q = ct_process_noise(params.sampling_s, params.q);
    model.R = Eigen::Vector2d(params.sigma_range_m * params.sigma_range_m, params.sigma_bearing2)
                  .asDiagonal();
    model.angular = {false, true};
    return model;
}

// ---------------------------------------------------------------------------
// Truth simulation
// ---------------------------------------------------------------------------

Trajectory simulate_truth(const StateSpaceModel& model, const Eigen::VectorXd& x0, int steps,
                          std::uint64_t seed, std::uint64_t run_index) {
    GaussianStream stream(seed, run_index);
    const Eigen::MatrixXd Lq = sqrt_factor(model.Q);
    const Eigen::MatrixXd Lr = sqrt_factor(model.R);

    Trajectory trajectory;
    trajectory.states.reserve(static_cast<std::size_t>(steps));
    trajectory.measurements.reserve(static_cast<std::size_t>(steps));

    Eigen::VectorXd x = x0;
    for (int k = 1; k <= steps; ++k) {
        x = model.process(x) + Lq * stream.normal_vector(model.state_dim);
        Eigen::VectorXd y = model.measurement(x, k) + Lr * stream.normal_vector(model.meas_dim);
        trajectory.states.push_back(x);
        trajectory.measurements.push_back(std::move(y));
    }
    return trajectory;
}

}  // namespace asgh
