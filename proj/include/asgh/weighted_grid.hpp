#pragma once

#include "asgh/errors.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace asgh {

// Coordinates closer than this per coordinate are treated as the same point.
// Nodes come from the shared level cache, so coincidence is exact up to the
// symmetrization in gauss_hermite.
inline constexpr double kPointMergeTolerance = 1e-12;

// Multivariate quadrature points with signed weights, in standard-normal
// space. The common currency of tensor rules, Smolyak combinations and
// compiled adaptive rules. A complete rule sums to 1; a difference
// increment away from the unit index sums to 0.
class WeightedGrid {
public:
    WeightedGrid() = default;
    explicit WeightedGrid(int dimension) : dimension_(dimension) {}

    int dimension() const { return dimension_; }
    int size() const { return static_cast<int>(weights_.size()); }

    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * dimension_,
                static_cast<std::size_t>(dimension_)};
    }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

    void add(std::span<const double> point, double weight);

    double weight_sum() const;

    // Sorted, deduplicated copy: coincident points merged by summing weights,
    // entries ordered lexicographically by coordinates.
    WeightedGrid merged() const;

    // CSV dump: header "x1,...,xn,weight", full double precision.
    void write_csv(std::ostream& os) const;

private:
    int dimension_ = 0;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

using Integrand = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Weighted sum of f over the grid; f is evaluated once per entry.
// Throws NumericalError if f returns a non-finite value, naming the point.
Eigen::VectorXd apply_grid(const WeightedGrid& grid, const Integrand& f);

}  // namespace asgh
