#pragma once

#include "asgh/multi_index.hpp"
#include "asgh/weighted_grid.hpp"

namespace asgh {

// Cartesian product of the level rules of lambda: entry count is the
// product of (2*lambda_j - 1), weights are products of univariate weights.
WeightedGrid tensor_rule(const MultiIndex& lambda);

// Full tensor grid with the same m-point univariate rule in every
// dimension (m need not be of the form 2l-1).
WeightedGrid full_tensor_grid(int dimension, int points_per_dim);

// Difference increment: tensor product of per-dimension rule differences
// (I_l - I_{l-1}, with I_0 = 0). Expands into a signed sum of 2^c tensor
// rules (c = number of components above level 1) and merges coincident
// points. Weight sum is 1 for the all-ones index, 0 otherwise.
WeightedGrid difference_increment(const MultiIndex& lambda);

// All multi-indices of the given dimension with level sum n + q, in
// lexicographic order; empty for q < 0.
IndexList level_sum_indices(int dimension, int q);

// Smolyak combination at accuracy level L: merged sum of difference
// increments over all indices with level sum <= L + n - 1. In one
// dimension this telescopes to the level-L rule.
WeightedGrid smolyak_grid(int dimension, int accuracy_level);

}  // namespace asgh
