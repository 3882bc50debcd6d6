#include "asgh/weighted_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

namespace asgh {

void WeightedGrid::add(std::span<const double> point, double weight) {
    coords_.insert(coords_.end(), point.begin(), point.end());
    weights_.push_back(weight);
}

double WeightedGrid::weight_sum() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

WeightedGrid WeightedGrid::merged() const {
    const int n = dimension_;
    std::vector<int> order(weights_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double* pa = coords_.data() + static_cast<std::size_t>(a) * n;
        const double* pb = coords_.data() + static_cast<std::size_t>(b) * n;
        return std::lexicographical_compare(pa, pa + n, pb, pb + n);
    });

    auto same_point = [&](int a, int b) {
        const double* pa = coords_.data() + static_cast<std::size_t>(a) * n;
        const double* pb = coords_.data() + static_cast<std::size_t>(b) * n;
        for (int j = 0; j < n; ++j) {
            if (std::abs(pa[j] - pb[j]) > kPointMergeTolerance) return false;
        }
        return true;
    };

    WeightedGrid out(n);
    for (std::size_t i = 0; i < order.size();) {
        const int head = order[i];
        double weight = weights_[static_cast<std::size_t>(head)];
        std::size_t j = i + 1;
        while (j < order.size() && same_point(head, order[j])) {
            weight += weights_[static_cast<std::size_t>(order[j])];
            ++j;
        }
        // Exactly cancelled points (telescoped lower-level nodes) carry no
        // information and are dropped.
        if (weight != 0.0) out.add(point(head), weight);
        i = j;
    }
    return out;
}

void WeightedGrid::write_csv(std::ostream& os) const {
    for (int j = 0; j < dimension_; ++j) os << 'x' << (j + 1) << ',';
    os << "weight\n";
    char buf[32];
    for (int i = 0; i < size(); ++i) {
        auto p = point(i);
        for (int j = 0; j < dimension_; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[j]);
            os << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", weight(i));
        os << buf << '\n';
    }
}

Eigen::VectorXd apply_grid(const WeightedGrid& grid, const Integrand& f) {
    Eigen::VectorXd x(grid.dimension());
    Eigen::VectorXd acc;
    for (int i = 0; i < grid.size(); ++i) {
        auto p = grid.point(i);
        for (int j = 0; j < grid.dimension(); ++j) x[j] = p[j];
        Eigen::VectorXd value = f(x);
        if (!value.allFinite()) {
            std::ostringstream msg;
            msg << "apply_grid: integrand returned a non-finite value at point (";
            for (int j = 0; j < grid.dimension(); ++j) msg << (j ? ", " : "") << x[j];
            msg << ")";
            throw NumericalError(msg.str());
        }
        if (acc.size() == 0) {
            acc = Eigen::VectorXd::Zero(value.size());
        }
        acc += grid.weight(i) * value;
    }
    return acc;
}

}  // namespace asgh
