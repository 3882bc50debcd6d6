#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace asgh {

// Vector of per-dimension refinement levels (all >= 1). Ordered
// lexicographically so index sets iterate deterministically.
class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<int> levels) : levels_(std::move(levels)) { validate(); }

    MultiIndex(std::initializer_list<int> levels) : levels_(levels) { validate(); }

    static MultiIndex ones(int dimension) {
        return MultiIndex(std::vector<int>(static_cast<std::size_t>(dimension), 1));
    }

    int dimension() const { return static_cast<int>(levels_.size()); }
    int operator[](int j) const { return levels_[static_cast<std::size_t>(j)]; }

    int level_sum() const { return std::accumulate(levels_.begin(), levels_.end(), 0); }

    bool is_ones() const {
        for (int l : levels_) {
            if (l != 1) return false;
        }
        return true;
    }

    MultiIndex incremented(int j) const {
        MultiIndex out = *this;
        ++out.levels_[static_cast<std::size_t>(j)];
        return out;
    }

    // Precondition: component j must be > 1.
    MultiIndex decremented(int j) const {
        MultiIndex out = *this;
        --out.levels_[static_cast<std::size_t>(j)];
        return out;
    }

    const std::vector<int>& levels() const { return levels_; }

    auto operator<=>(const MultiIndex&) const = default;

private:
    void validate() const {
        if (levels_.empty()) throw std::invalid_argument("MultiIndex: dimension must be >= 1");
        for (int l : levels_) {
            if (l < 1) throw std::invalid_argument("MultiIndex: levels must be >= 1");
        }
    }

    std::vector<int> levels_;
};

using IndexList = std::vector<MultiIndex>;

}  // namespace asgh
