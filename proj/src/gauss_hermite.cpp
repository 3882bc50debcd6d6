#include "asgh/gauss_hermite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace asgh {

namespace {

// Enforce exact node symmetry and an exact unit weight sum. Eigenvalue
// output is symmetric only up to roundoff; averaging node j with the
// negated mirror node keeps odd moments exactly zero and makes grid
// deduplication across rules stable.
void symmetrize(Rule1D& rule) {
    const int m = rule.size();
    for (int j = 0; j < m / 2; ++j) {
        const int k = m - 1 - j;
        const double node = 0.5 * (rule.nodes[j] - rule.nodes[k]);
        rule.nodes[j] = node;
        rule.nodes[k] = -node;
        const double weight = 0.5 * (rule.weights[j] + rule.weights[k]);
        rule.weights[j] = weight;
        rule.weights[k] = weight;
    }
    if (m % 2 == 1) rule.nodes[m / 2] = 0.0;

    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    for (double& w : rule.weights) w /= sum;
}

}  // namespace

Rule1D gauss_hermite_rule(int point_count) {
    if (point_count < 1) {
        throw std::invalid_argument("gauss_hermite_rule: point count must be >= 1");
    }
    const int m = point_count;

    Rule1D rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);

    if (m == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 1.0;
        return rule;
    }

    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd subdiag(m - 1);
    for (int j = 1; j < m; ++j) subdiag[j - 1] = std::sqrt(static_cast<double>(j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("gauss_hermite_rule: tridiagonal eigen-decomposition failed");
    }

    // Eigenvalues come out ascending; first-row components give the weights.
    for (int j = 0; j < m; ++j) {
        rule.nodes[j] = solver.eigenvalues()[j];
        const double v0 = solver.eigenvectors()(0, j);
        rule.weights[j] = v0 * v0;
    }
    symmetrize(rule);
    return rule;
}

const Rule1D& rule_for_level(int level) {
    if (level < 1) {
        throw std::invalid_argument("rule_for_level: level must be >= 1");
    }

    static std::shared_mutex mutex;
    static std::map<int, std::unique_ptr<const Rule1D>> cache;

    {
        std::shared_lock lock(mutex);
        auto it = cache.find(level);
        if (it != cache.end()) return *it->second;
    }

    Rule1D rule = gauss_hermite_rule(2 * level - 1);
    rule.level = level;

    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace(level, std::make_unique<const Rule1D>(std::move(rule)));
    return *it->second;
}

}  // namespace asgh
