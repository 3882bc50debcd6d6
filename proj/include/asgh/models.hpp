#pragma once

#include "asgh/filter.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace asgh {

// Separable test integrand sum_i x_i^(2i); its standard-normal integral is
// sum_i (2i-1)!! (11464 for n = 6).
double sum_even_powers(const Eigen::VectorXd& x);

// Exact standard-normal moment E[x^k]: (k-1)!! for even k, 0 for odd k.
double gaussian_moment(int k);

// --------------------------------------------------------------------------
// Superimposed sinusoids: state [f1 f2 f3 a1 a2 a3], identity process,
// phase/quadrature measurement at step k.
// --------------------------------------------------------------------------
struct SinusoidParams {
    int num_sinusoids = 3;
    double sampling_s = 1.667e-4;  // 0.1667 ms
    double sigma_f2 = 151e-6;      // 151 uHz^2 per step
    double sigma_a2 = 80e-6;       // 80 uV^2 per step
    double sigma_n2 = 0.09;        // V^2
    Eigen::VectorXd initial_truth;     // [200 1000 2000 5 4 3]
    Eigen::VectorXd initial_estimate;  // [150 900 1800 4 4 2]
    Eigen::VectorXd p0_diagonal;

    static SinusoidParams scenario(int id);
};

StateSpaceModel sinusoid_model(const SinusoidParams& params);

// --------------------------------------------------------------------------
// Coordinated turn: state [x vx y vy omega], range/bearing measurement.
// Turn rate is stored in rad/s.
// --------------------------------------------------------------------------
struct CTParams {
    double sampling_s = 0.5;
    double q = 0.1;
    double sigma_range_m = 120.0;
    double sigma_bearing2 = 70e-6;  // rad^2 (sqrt(70) mrad)
    double omega_rad_s = 3.0 * 3.14159265358979323846 / 180.0;
    Eigen::VectorXd initial_truth;  // [1000 30 1000 0 omega]
    Eigen::VectorXd p0_diagonal;    // [200 20 200 20 100e-6]

    static CTParams with_omega_deg(double omega_deg);
};

// F(omega) * x with the analytic constant-velocity limit as omega -> 0.
Eigen::VectorXd ct_transition(const Eigen::VectorXd& x, double sampling_s);

// [range, atan2(y, x)]. Throws NumericalError at the origin where the
// bearing is undefined.
Eigen::VectorXd ct_measurement(const Eigen::VectorXd& x);

// Block process-noise covariance with T^3/3, T^2/2, T blocks and the
// 0.009*T turn-rate entry, scaled by q.
Eigen::MatrixXd ct_process_noise(double sampling_s, double q);

StateSpaceModel coordinated_turn_model(const CTParams& params);

// --------------------------------------------------------------------------
// Truth simulation
// --------------------------------------------------------------------------
struct Trajectory {
    std::vector<Eigen::VectorXd> states;        // x_1 ... x_K
    std::vector<Eigen::VectorXd> measurements;  // y_1 ... y_K
};

// Iterates the model from x0 with noise drawn from N(0,Q) and N(0,R),
// using a stream keyed by (seed, run_index); deterministic per key.
Trajectory simulate_truth(const StateSpaceModel& model, const Eigen::VectorXd& x0, int steps,
                          std::uint64_t seed, std::uint64_t run_index = 0);

}  // namespace asgh
