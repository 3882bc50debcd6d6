#include "asgh/sparse_grid.hpp"

#include "asgh/gauss_hermite.hpp"

#include <stdexcept>
#include <vector>

namespace asgh {

namespace {

// Product grid over per-dimension rules, appended to out with the given
// sign. Odometer walk keeps entry order deterministic.
void append_product(const std::vector<const Rule1D*>& rules, double sign, WeightedGrid& out) {
    const int n = static_cast<int>(rules.size());
    std::vector<int> pos(static_cast<std::size_t>(n), 0);
    std::vector<double> point(static_cast<std::size_t>(n));
    for (;;) {
        double weight = sign;
        for (int j = 0; j < n; ++j) {
            point[static_cast<std::size_t>(j)] = rules[static_cast<std::size_t>(j)]->nodes[pos[j]];
            weight *= rules[static_cast<std::size_t>(j)]->weights[pos[j]];
        }
        out.add(point, weight);

        int j = n - 1;
        while (j >= 0 && ++pos[j] == rules[static_cast<std::size_t>(j)]->size()) {
            pos[j] = 0;
            --j;
        }
        if (j < 0) break;
    }
}

}  // namespace

WeightedGrid tensor_rule(const MultiIndex& lambda) {
    std::vector<const Rule1D*> rules;
    rules.reserve(static_cast<std::size_t>(lambda.dimension()));
    for (int j = 0; j < lambda.dimension(); ++j) rules.push_back(&rule_for_level(lambda[j]));
    WeightedGrid grid(lambda.dimension());
    append_product(rules, 1.0, grid);
    return grid;
}

WeightedGrid full_tensor_grid(int dimension, int points_per_dim) {
    if (dimension < 1) throw std::invalid_argument("full_tensor_grid: dimension must be >= 1");
    const Rule1D rule = gauss_hermite_rule(points_per_dim);
    std::vector<const Rule1D*> rules(static_cast<std::size_t>(dimension), &rule);
    WeightedGrid grid(dimension);
    append_product(rules, 1.0, grid);
    return grid;
}

WeightedGrid difference_increment(const MultiIndex& lambda) {
    const int n = lambda.dimension();

    // Dimensions where the difference has a lower term to subtract.
    std::vector<int> splittable;
    for (int j = 0; j < n; ++j) {
        if (lambda[j] > 1) splittable.push_back(j);
    }

    WeightedGrid raw(n);
    const int c = static_cast<int>(splittable.size());
    std::vector<const Rule1D*> rules(static_cast<std::size_t>(n));
    for (unsigned mask = 0; mask < (1u << c); ++mask) {
        int decremented = 0;
        for (int j = 0; j < n; ++j) rules[static_cast<std::size_t>(j)] = &rule_for_level(lambda[j]);
        for (int b = 0; b < c; ++b) {
            if (mask & (1u << b)) {
                const int j = splittable[static_cast<std::size_t>(b)];
                rules[static_cast<std::size_t>(j)] = &rule_for_level(lambda[j] - 1);
                ++decremented;
            }
        }
        append_product(rules, (decremented % 2 == 0) ? 1.0 : -1.0, raw);
    }
    return raw.merged();
}

IndexList level_sum_indices(int dimension, int q) {
    IndexList out;
    if (q < 0) return out;

    // Compositions of dimension + q into `dimension` parts >= 1, lexicographic.
    std::vector<int> levels(static_cast<std::size_t>(dimension), 1);
    const int total = dimension + q;

    auto recurse = [&](auto&& self, int j, int remaining) -> void {
        if (j == dimension - 1) {
            levels[static_cast<std::size_t>(j)] = remaining;
            out.push_back(MultiIndex(levels));
            return;
        }
        const int slots_after = dimension - 1 - j;
        for (int l = 1; l <= remaining - slots_after; ++l) {
            levels[static_cast<std::size_t>(j)] = l;
            self(self, j + 1, remaining - l);
        }
    };
    recurse(recurse, 0, total);
    return out;
}

WeightedGrid smolyak_grid(int dimension, int accuracy_level) {
    if (dimension < 1) throw std::invalid_argument("smolyak_grid: dimension must be >= 1");
    if (accuracy_level < 1) throw std::invalid_argument("smolyak_grid: accuracy level must be >= 1");

    WeightedGrid raw(dimension);
    for (int q = 0; q <= accuracy_level - 1; ++q) {
        for (const MultiIndex& lambda : level_sum_indices(dimension, q)) {
            const WeightedGrid increment = difference_increment(lambda);
            for (int i = 0; i < increment.size(); ++i) raw.add(increment.point(i), increment.weight(i));
        }
    }
    return raw.merged();
}

}  // namespace asgh
