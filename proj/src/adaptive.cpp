#include "asgh/adaptive.hpp"

#include "asgh/sparse_grid.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace asgh {

namespace {

constexpr double kZeroReferenceThreshold = 1e-300;

// Evaluation cache shared across increments: the same physical point
// (origin, axis nodes) appears in many tensor expansions but the model
// function is evaluated once.
class CachedIntegrand {
public:
    CachedIntegrand(const Integrand& f, int dimension) : f_(f), x_(dimension) {}

    // Weighted sum of f over the grid, extending the cache as needed.
    Eigen::VectorXd apply(const WeightedGrid& grid) {
        Eigen::VectorXd acc;
        std::vector<double> key(static_cast<std::size_t>(grid.dimension()));
        for (int i = 0; i < grid.size(); ++i) {
            auto p = grid.point(i);
            key.assign(p.begin(), p.end());
            auto it = cache_.find(key);
            if (it == cache_.end()) {
                for (int j = 0; j < grid.dimension(); ++j) x_[j] = p[j];
                Eigen::VectorXd value = f_(x_);
                if (!value.allFinite()) {
                    std::ostringstream msg;
                    msg << "adapt: integrand returned a non-finite value at point (";
                    for (int j = 0; j < grid.dimension(); ++j) msg << (j ? ", " : "") << p[j];
                    msg << ")";
                    throw NumericalError(msg.str());
                }
                it = cache_.emplace(key, std::move(value)).first;
            }
            if (acc.size() == 0) acc = Eigen::VectorXd::Zero(it->second.size());
            acc += grid.weight(i) * it->second;
        }
        return acc;
    }

    long eval_count() const { return static_cast<long>(cache_.size()); }

private:
    const Integrand& f_;
    Eigen::VectorXd x_;
    std::map<std::vector<double>, Eigen::VectorXd> cache_;
};

long per_index_cost(const MultiIndex& lambda) {
    long cost = 1;
    for (int j = 0; j < lambda.dimension(); ++j) cost *= 2 * lambda[j] - 1;
    return cost;
}

double one_norm(const Eigen::VectorXd& v) { return v.lpNorm<1>(); }

}  // namespace

IndexList forward_indices(const MultiIndex& lambda) {
    IndexList out;
    out.reserve(static_cast<std::size_t>(lambda.dimension()));
    for (int j = 0; j < lambda.dimension(); ++j) out.push_back(lambda.incremented(j));
    return out;
}

IndexList backward_indices(const MultiIndex& lambda) {
    IndexList out;
    for (int j = 0; j < lambda.dimension(); ++j) {
        if (lambda[j] > 1) out.push_back(lambda.decremented(j));
    }
    return out;
}

bool is_admissible_insertion(const std::set<MultiIndex>& old, const MultiIndex& lambda) {
    for (const MultiIndex& back : backward_indices(lambda)) {
        if (!old.contains(back)) return false;
    }
    return true;
}

double local_error_indicator(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_ref,
                             long cost, double psi) {
    if (psi < 0.0 || psi > 1.0) {
        throw std::invalid_argument("local_error_indicator: psi must lie in [0,1]");
    }
    if (cost < 1) {
        throw std::invalid_argument("local_error_indicator: cost must be >= 1");
    }
    const double ref = one_norm(delta_ref);
    const double ratio = ref < kZeroReferenceThreshold ? 0.0 : one_norm(delta) / ref;
    return std::max(psi * ratio, (1.0 - psi) / static_cast<double>(cost));
}

AdaptResult adapt(const Integrand& f, int dimension, const AdaptConfig& config,
                  const AdaptObserver& observer) {
    if (dimension < 1) throw std::invalid_argument("adapt: dimension must be >= 1");
    if (config.psi < 0.0 || config.psi > 1.0) {
        throw std::invalid_argument("adapt: psi must lie in [0,1]");
    }
    if (!(config.tol > 0.0)) throw std::invalid_argument("adapt: tol must be > 0");

    AdaptResult result;
    IndexSetState& state = result.state;
    state.dimension = dimension;

    CachedIntegrand cached(f, dimension);

    const MultiIndex unit = MultiIndex::ones(dimension);
    const Eigen::VectorXd first_increment = cached.apply(difference_increment(unit));
    state.eval_count = cached.eval_count();

    // Reference magnitude for the ratio term. When the first increment
    // vanishes, absolute increment magnitudes take its place so that the
    // indicators can still see the integrand; the report flags this.
    double reference_norm = one_norm(first_increment);
    if (reference_norm < kZeroReferenceThreshold) {
        reference_norm = 1.0;
        result.report.zero_reference_warning = true;
    }

    long visited_indices = 0;
    auto indicator_for = [&](const MultiIndex& lambda, const Eigen::VectorXd& increment) {
        ++visited_indices;
        long cost = 1;
        switch (config.cost_convention) {
            case CostConvention::kCumulativeIndices:
                cost = visited_indices;
                break;
            case CostConvention::kCumulativeWork:
                cost = std::max<long>(1, cached.eval_count());
                break;
            case CostConvention::kPerIndex:
                cost = per_index_cost(lambda);
                break;
        }
        const double ratio = one_norm(increment) / reference_norm;
        return std::max(config.psi * ratio, (1.0 - config.psi) / static_cast<double>(cost));
    };

    state.active.insert(unit);
    state.increments[unit] = first_increment;
    state.indicators[unit] = indicator_for(unit, first_increment);
    state.running_integral = first_increment;
    state.global_error = state.indicators[unit];

    // The first pass always runs: the loop guard starts from the
    // "arbitrarily high" sentinel, not from the first indicator.
    double loop_error = std::numeric_limits<double>::infinity();
    while (loop_error > config.tol) {
        if (state.active.empty()) break;

        // Largest indicator wins; ties go to the lexicographically
        // greatest index (matches the worked trace where the first
        // dimension is refined first).
        auto best = state.active.begin();
        double best_g = state.indicators.at(*best);
        for (auto it = std::next(state.active.begin()); it != state.active.end(); ++it) {
            const double g = state.indicators.at(*it);
            if (g > best_g || (g == best_g && *it > *best)) {
                best = it;
                best_g = g;
            }
        }

        const MultiIndex selected = *best;
        state.active.erase(best);
        state.old.insert(selected);

        for (const MultiIndex& neighbor : forward_indices(selected)) {
            if (!is_admissible_insertion(state.old, neighbor)) continue;
            const Eigen::VectorXd increment = cached.apply(difference_increment(neighbor));
            state.eval_count = cached.eval_count();
            const double g = indicator_for(neighbor, increment);
            state.active.insert(neighbor);
            state.increments[neighbor] = increment;
            state.indicators[neighbor] = g;
            state.running_integral += increment;
        }

        // Recompute rather than increment: keeps the error equal to the sum
        // of active indicators to machine precision.
        state.global_error = 0.0;
        for (const MultiIndex& lambda : state.active) state.global_error += state.indicators.at(lambda);

        loop_error = state.global_error;
        if (observer) observer(state);

        const int index_count = static_cast<int>(state.active.size() + state.old.size());
        if (index_count >= config.max_indices || state.eval_count >= config.max_evals) {
            result.report.budget_exhausted = loop_error > config.tol;
            break;
        }
    }

    result.compiled = compile_grid(state);
    result.report.index_count = static_cast<int>(state.active.size() + state.old.size());
    result.report.point_count = result.compiled.grid.size();
    result.report.eval_count = state.eval_count;
    result.report.final_global_error = state.global_error;
    return result;
}

CompiledGrid compile_grid(const IndexSetState& state) {
    WeightedGrid raw(state.dimension);
    IndexList indices;
    for (const auto& [lambda, increment] : state.increments) {
        indices.push_back(lambda);
        const WeightedGrid grid = difference_increment(lambda);
        for (int i = 0; i < grid.size(); ++i) raw.add(grid.point(i), grid.weight(i));
    }
    return CompiledGrid{raw.merged(), std::move(indices)};
}

void write_compiled_grid(const AdaptResult& result, const AdaptConfig& config,
                         const std::string& csv_path, const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("write_compiled_grid: cannot open " + csv_path);
    result.compiled.grid.write_csv(csv);

    nlohmann::json sidecar{
        {"dimension", result.state.dimension},
        {"psi", config.psi},
        {"tol", config.tol},
        {"index_count", result.report.index_count},
        {"point_count", result.report.point_count},
        {"final_global_error", result.report.final_global_error},
        {"budget_exhausted", result.report.budget_exhausted},
    };
    std::ofstream json(json_path);
    if (!json) throw std::runtime_error("write_compiled_grid: cannot open " + json_path);
    json << sidecar.dump(2) << '\n';
}

}  // namespace asgh
