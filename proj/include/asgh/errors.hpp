#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace asgh {

// Thrown when an integrand or a filter step produces a non-finite value.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a covariance cannot be factorized even after jitter escalation.
// Carries the offending matrix for diagnostics.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    NotPositiveDefiniteError(const std::string& what, Eigen::MatrixXd matrix)
        : std::runtime_error(what), matrix_(std::move(matrix)) {}

    const Eigen::MatrixXd& matrix() const { return matrix_; }

private:
    Eigen::MatrixXd matrix_;
};

}  // namespace asgh
