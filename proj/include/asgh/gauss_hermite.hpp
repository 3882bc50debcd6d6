#pragma once

#include <vector>

namespace asgh {

// Univariate Gauss-Hermite rule in probabilists' convention: nodes and
// weights integrate polynomials exactly against the standard normal
// density N(0,1). A rule at refinement level l carries 2l-1 nodes.
//
// Invariants (enforced by construction):
//   - nodes ascending, exactly symmetric about 0,
//   - weights strictly positive and summing to exactly 1,
//   - level == 0 marks a raw rule not tagged with a level.
struct Rule1D {
    int level = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

// m-point rule from the eigen-decomposition of the Jacobi matrix of the
// probabilists' Hermite polynomials (zero diagonal, off-diagonals
// sqrt(1), ..., sqrt(m-1)). Node j is the j-th eigenvalue; weight j is
// the squared first component of the j-th normalized eigenvector.
// Throws std::invalid_argument for m == 0.
Rule1D gauss_hermite_rule(int point_count);

// Rule with 2*level - 1 points, tagged with its level. Results are cached;
// repeated calls return the same object. Safe for concurrent use (shared
// reads, exclusive insert). Throws std::invalid_argument for level == 0.
const Rule1D& rule_for_level(int level);

}  // namespace asgh
