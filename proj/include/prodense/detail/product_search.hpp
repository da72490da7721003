#pragma once

// Lexicographic search for coordinate subsets (I_q) whose product fits inside
// several sets at once. Each constraint is a residual set R over [q, level):
// the suffixes y such that every already-chosen prefix followed by y lies in
// the level's set. Choosing I_q replaces R by the intersection of its fibers
// over I_q, so residuals only shrink and dead branches are cut early.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "prodense/correlation.hpp"
#include "prodense/errors.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"

namespace prodense::detail {

struct LevelResidual {
    std::size_t level = 0;
    PointSet residual;  // over [search start, level)
};

struct ProductSearchResult {
    SubgridWitness witness;
    std::vector<std::size_t> satisfied;  // ascending levels
};

class ProductSearch {
public:
    /// `space` covers [start, max level); targets[q] is the demanded |I_q|
    /// for absolute coordinate q. The search succeeds once `required`
    /// constraints are satisfied and returns the lexicographically least
    /// witness (shorter witnesses first when they already suffice).
    ProductSearch(GridShape space, std::span<const std::uint64_t> targets, std::size_t required, const Limits& limits)
        : space_(std::move(space)), targets_(targets.begin(), targets.end()), required_(required),
          counter_(limits.max_nodes) {
        if (targets_.size() < space_.end()) throw DomainError("product search: targets do not cover every coordinate");
        for (std::size_t q = space_.start; q < space_.end(); ++q) {
            if (targets_[q] == 0) throw DomainError("product search: targets must be >= 1");
        }
    }

    std::optional<ProductSearchResult> run(std::vector<LevelResidual> constraints) {
        std::vector<LevelResidual> alive;
        std::vector<std::size_t> satisfied;
        for (auto& c : constraints) {
            if (c.level < space_.start || c.level > space_.end() ||
                !(c.residual.shape() == space_.slice(space_.start, c.level))) {
                throw DomainError("product search: residual shape does not match its level");
            }
            if (c.level == space_.start) {
                if (c.residual.contains(0)) satisfied.push_back(c.level);
            } else {
                alive.push_back(std::move(c));
            }
        }
        witness_ = SubgridWitness{space_.start, {}};
        if (dfs(space_.start, alive, satisfied)) return result_;
        return std::nullopt;
    }

    std::uint64_t nodes() const { return counter_.nodes(); }

private:
    // prod_{p=from}^{level-1} m_p, saturated.
    std::uint64_t needed(std::size_t level, std::size_t from) const {
        std::uint64_t out = 1;
        for (std::size_t p = from; p < level; ++p) {
            if (out > std::numeric_limits<std::uint64_t>::max() / targets_[p]) {
                return std::numeric_limits<std::uint64_t>::max();
            }
            out *= targets_[p];
        }
        return out;
    }

    struct Partial {
        BitVector bits;
        bool alive = true;
    };

    bool dfs(std::size_t q, const std::vector<LevelResidual>& alive, const std::vector<std::size_t>& satisfied) {
        if (satisfied.size() >= required_) {
            result_ = ProductSearchResult{witness_, satisfied};
            std::sort(result_.satisfied.begin(), result_.satisfied.end());
            return true;
        }
        if (satisfied.size() + alive.size() < required_) return false;

        std::vector<std::vector<PointSet>> fibers;
        std::vector<Partial> partials;
        std::vector<std::uint64_t> floors;
        fibers.reserve(alive.size());
        for (const auto& c : alive) {
            fibers.push_back(first_coordinate_fibers(c.residual));
            partials.push_back(Partial{BitVector(fibers.back().front().cardinality(), true), true});
            floors.push_back(needed(c.level, q + 1));
        }
        std::vector<std::uint64_t> chosen;
        return choose(q, alive, satisfied, fibers, floors, partials, chosen, 0);
    }

    bool choose(std::size_t q, const std::vector<LevelResidual>& alive, const std::vector<std::size_t>& satisfied,
                const std::vector<std::vector<PointSet>>& fibers, const std::vector<std::uint64_t>& floors,
                const std::vector<Partial>& partials, std::vector<std::uint64_t>& chosen, std::uint64_t from) {
        const std::uint64_t m = targets_[q];
        if (chosen.size() == m) return descend(q, alive, satisfied, partials, chosen);

        const std::uint64_t n = space_.size_at(q);
        const std::uint64_t remaining = m - chosen.size();
        for (std::uint64_t x = from; x + remaining <= n; ++x) {
            counter_.tick();
            std::vector<Partial> next = partials;
            std::size_t live = 0;
            for (std::size_t l = 0; l < alive.size(); ++l) {
                if (!next[l].alive) continue;
                next[l].bits &= fibers[l][x].bits();
                next[l].alive = next[l].bits.count() >= floors[l];
                live += next[l].alive;
            }
            if (satisfied.size() + live < required_) continue;
            chosen.push_back(x);
            if (choose(q, alive, satisfied, fibers, floors, next, chosen, x + 1)) return true;
            chosen.pop_back();
        }
        return false;
    }

    bool descend(std::size_t q, const std::vector<LevelResidual>& alive, const std::vector<std::size_t>& satisfied,
                 const std::vector<Partial>& partials, const std::vector<std::uint64_t>& chosen) {
        std::vector<LevelResidual> next_alive;
        std::vector<std::size_t> next_satisfied = satisfied;
        for (std::size_t l = 0; l < alive.size(); ++l) {
            if (!partials[l].alive) continue;
            if (alive[l].level == q + 1) {
                next_satisfied.push_back(alive[l].level);
            } else {
                next_alive.push_back(
                    LevelResidual{alive[l].level, PointSet::adopt(space_.slice(q + 1, alive[l].level), partials[l].bits)});
            }
        }
        witness_.subsets.push_back(chosen);
        if (dfs(q + 1, next_alive, next_satisfied)) return true;
        witness_.subsets.pop_back();
        return false;
    }

    GridShape space_;
    std::vector<std::uint64_t> targets_;
    std::size_t required_;
    NodeCounter counter_;
    SubgridWitness witness_;
    ProductSearchResult result_;
};

/// {y over [cut, end) : gamma concatenated with y lies in D}; gamma is over
/// D's coordinates below cut. An empty gamma leaves every y.
inline PointSet prefix_residual(const PointSet& d, const PointSet& gamma) {
    const GridShape& shape = d.shape();
    if (gamma.shape().start != shape.start || !(gamma.shape() == shape.prefix(gamma.shape().end()))) {
        throw DomainError("gamma is not over a prefix of the level");
    }
    const GridShape tail = shape.suffix(gamma.shape().end());
    const std::uint64_t stride = gamma.cardinality();
    const auto heads = gamma.indices();
    BitVector bits(tail.cardinality());
    for (std::uint64_t y = 0; y < bits.size(); ++y) {
        bool all = true;
        for (auto h : heads) {
            if (!d.bits().test(h + stride * y)) {
                all = false;
                break;
            }
        }
        if (all) bits.set(y);
    }
    return PointSet::adopt(tail, std::move(bits));
}

}  // namespace prodense::detail
