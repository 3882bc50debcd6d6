#pragma once

#include "asgh/multi_index.hpp"
#include "asgh/weighted_grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <map>
#include <set>
#include <string>

namespace asgh {

// How the cost term of the error indicator counts work.
//
//   kCumulativeIndices: cost of a fresh index is one over the number of
//     indices visited so far. Exploration cost fades harmonically as the
//     set grows, so runs terminate on integrands whose increments vanish
//     while tolerances of order one still buy a few extra refinement
//     rounds. This is the default and the convention the benchmark
//     tolerances are calibrated against.
//
//   kCumulativeWork: cost of a fresh index is one over the total number
//     of distinct integrand evaluations performed so far. Decays faster
//     than kCumulativeIndices, so adaptation stops earlier.
//
//   kPerIndex: cost of index lambda is one over its tensor-rule point
//     count, prod(2*lambda_j - 1). Kept as a documented alternative; on
//     smooth low-variation integrands in higher dimensions the summed
//     cost floors can exceed practical tolerances for a long time, so
//     runs may end by budget instead of tolerance.
enum class CostConvention { kCumulativeIndices, kCumulativeWork, kPerIndex };

struct AdaptConfig {
    double psi = 0.5;           // error weighting in [0,1]
    double tol = 1e-2;          // stopping tolerance, > 0
    int max_indices = 10000;    // budget on |old| + |active|
    long max_evals = 1000000;   // budget on distinct integrand evaluations
    CostConvention cost_convention = CostConvention::kCumulativeIndices;
};

// Bookkeeping of one adaptation run.
struct IndexSetState {
    int dimension = 0;
    std::set<MultiIndex> active;
    std::set<MultiIndex> old;
    std::map<MultiIndex, Eigen::VectorXd> increments;
    std::map<MultiIndex, double> indicators;
    double global_error = 0.0;
    Eigen::VectorXd running_integral;
    long eval_count = 0;
};

struct AdaptReport {
    int index_count = 0;
    int point_count = 0;
    long eval_count = 0;
    double final_global_error = 0.0;
    bool budget_exhausted = false;
    // Set when the first increment had (near-)zero norm and absolute
    // increment magnitudes were used in place of the ratio.
    bool zero_reference_warning = false;
};

// Points and weights captured across all accepted increments, reusable as
// an ordinary quadrature rule. Applying it to the adaptation integrand
// reproduces the running integral.
struct CompiledGrid {
    WeightedGrid grid;
    IndexList indices;  // the final admissible index set (old + active)
};

struct AdaptResult {
    CompiledGrid compiled;
    IndexSetState state;
    AdaptReport report;
};

// Neighbors lambda + e_j, in dimension order.
IndexList forward_indices(const MultiIndex& lambda);

// Neighbors lambda - e_j for every component above 1, in dimension order.
IndexList backward_indices(const MultiIndex& lambda);

// True iff every backward index of lambda lies in old. Inserting such a
// lambda into the active set keeps old + active admissible.
bool is_admissible_insertion(const std::set<MultiIndex>& old, const MultiIndex& lambda);

// Error indicator: max of the weighted increment-magnitude ratio and the
// weighted inverse cost,
//   g = max( psi * |delta|_1 / |delta_ref|_1 , (1 - psi) * 1 / cost ).
// A zero-norm reference makes the first term 0. psi outside [0,1] or
// cost < 1 throws std::invalid_argument.
double local_error_indicator(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_ref,
                             long cost, double psi);

// Observer called after every completed loop iteration (for invariant
// checks and tracing).
using AdaptObserver = std::function<void(const IndexSetState&)>;

// Grow an admissible index set from the all-ones index, driven by the
// error indicators, until the global error (sum of active indicators)
// falls below tol or a budget runs out. The integrand is evaluated once
// per distinct point across all increments.
AdaptResult adapt(const Integrand& f, int dimension, const AdaptConfig& config,
                  const AdaptObserver& observer = {});

// Merge the signed expansions of every visited increment into one
// deduplicated grid.
CompiledGrid compile_grid(const IndexSetState& state);

// Serialization: CSV point dump plus a JSON sidecar with the run summary
// {dimension, psi, tol, index_count, point_count, final_global_error,
//  budget_exhausted}.
void write_compiled_grid(const AdaptResult& result, const AdaptConfig& config,
                         const std::string& csv_path, const std::string& json_path);

}  // namespace asgh
