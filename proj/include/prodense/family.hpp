#pragma once

// Finite hereditary families of level sets: which finite level sets F admit
// one common witness (I_q) after a fixed prefix pattern Gamma, the rank of
// the resulting family, and the search for a common witness across many
// levels.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "prodense/detail/product_search.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/extraction.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"

namespace prodense {

using LevelSet = std::vector<std::size_t>;  // sorted, duplicate-free

/// A family of nonempty finite subsets of a finite ground set.
struct FiniteSetFamily {
    std::vector<std::size_t> ground;
    std::set<LevelSet> members;

    /// Closed under removing an element while staying nonempty.
    bool hereditary() const {
        for (const auto& f : members) {
            if (f.size() < 2) continue;
            for (std::size_t skip = 0; skip < f.size(); ++skip) {
                LevelSet smaller;
                for (std::size_t j = 0; j < f.size(); ++j) {
                    if (j != skip) smaller.push_back(f[j]);
                }
                if (!members.contains(smaller)) return false;
            }
        }
        return true;
    }
};

/// The order behind the rank recursion. End-extension: G extends F when F is
/// a proper subset of G and every new element exceeds max F. Inclusion: any
/// proper superset.
enum class RankOrder { end_extension, inclusion };

namespace detail {

inline bool extends(const LevelSet& f, const LevelSet& g, RankOrder order) {
    if (g.size() <= f.size() || !std::includes(g.begin(), g.end(), f.begin(), f.end())) return false;
    if (order == RankOrder::inclusion || f.empty()) return true;
    // g is a superset of f, so the elements of g above max f are exactly the new ones.
    const std::size_t top = f.back();
    return static_cast<std::size_t>(std::count_if(g.begin(), g.end(), [&](std::size_t v) { return v > top; })) ==
           g.size() - f.size();
}

inline std::vector<detail::LevelResidual> residuals_for(const LevelFamily& levels, const PointSet& gamma,
                                                        std::span<const std::size_t> chosen) {
    std::vector<detail::LevelResidual> out;
    for (auto k : chosen) out.push_back({k, detail::prefix_residual(levels.at(k), gamma)});
    return out;
}

inline void check_gamma(const LevelFamily& levels, std::size_t cut, const PointSet& gamma) {
    if (cut < levels.start()) throw DomainError("cut below the family start");
    if (!(gamma.shape() == levels.base().prefix(cut))) {
        throw DomainError("gamma is not over the coordinates [start, cut) of the family");
    }
}

}  // namespace detail

/// A single witness (I_q) for q in [cut, max F) with Gamma followed by
/// prod_{q=cut}^{k-1} I_q inside D_k for every k in F, or nullopt.
inline std::optional<SubgridWitness> family_member(const LevelSet& f, std::size_t cut, const PointSet& gamma,
                                                   const LevelFamily& levels, std::span<const std::uint64_t> targets,
                                                   const Limits& limits = {}) {
    if (f.empty()) throw DomainError("family_member: F must be nonempty");
    if (!std::is_sorted(f.begin(), f.end()) || std::adjacent_find(f.begin(), f.end()) != f.end()) {
        throw DomainError("family_member: F must be sorted and duplicate-free");
    }
    if (f.front() <= cut) throw DomainError("family_member: min F must exceed the cut");
    for (auto k : f) {
        if (!levels.levels().contains(k)) throw DomainError("family_member: level " + std::to_string(k) + " is absent");
    }
    detail::check_gamma(levels, cut, gamma);
    detail::ProductSearch search(levels.base().slice(cut, f.back()), targets, f.size(), limits);
    auto found = search.run(detail::residuals_for(levels, gamma, f));
    if (!found) return std::nullopt;
    return found->witness;
}

/// Every F of at most `cap` levels above the cut that is a member. Larger
/// sets are only tried when all their one-smaller subsets are members.
inline FiniteSetFamily enumerate_family(std::size_t cut, const PointSet& gamma, const LevelFamily& levels,
                                        std::span<const std::uint64_t> targets, std::size_t cap,
                                        const Limits& limits = {}) {
    FiniteSetFamily fam;
    for (auto k : levels.keys()) {
        if (k > cut) fam.ground.push_back(k);
    }
    std::vector<LevelSet> frontier{LevelSet{}};
    for (std::size_t size = 1; size <= cap && !frontier.empty(); ++size) {
        std::vector<LevelSet> next;
        for (const auto& base : frontier) {
            for (auto k : fam.ground) {
                if (!base.empty() && k <= base.back()) continue;
                LevelSet candidate = base;
                candidate.push_back(k);
                bool subsets_present = true;
                for (std::size_t skip = 0; skip + 1 < candidate.size() && subsets_present; ++skip) {
                    LevelSet smaller;
                    for (std::size_t j = 0; j < candidate.size(); ++j) {
                        if (j != skip) smaller.push_back(candidate[j]);
                    }
                    subsets_present = fam.members.contains(smaller);
                }
                if (!subsets_present) continue;
                if (family_member(candidate, cut, gamma, levels, targets, limits)) {
                    fam.members.insert(candidate);
                    next.push_back(std::move(candidate));
                }
            }
        }
        frontier = std::move(next);
    }
    return fam;
}

/// r(empty set) for the family with the empty set adjoined, where maximal
/// members have r = 0 and r(F) = max { r(G) + 1 : G extends F }.
inline std::size_t hereditary_rank(const FiniteSetFamily& fam, RankOrder order = RankOrder::end_extension) {
    if (!fam.hereditary()) throw DomainError("hereditary_rank: the family is not hereditary");
    std::vector<LevelSet> all(fam.members.begin(), fam.members.end());
    all.emplace_back();
    // Any extension is strictly larger, so deciding sets by decreasing size
    // sees every extension's rank first.
    std::stable_sort(all.begin(), all.end(), [](const LevelSet& a, const LevelSet& b) { return a.size() > b.size(); });
    std::map<LevelSet, std::size_t> rank;
    for (const auto& f : all) {
        std::size_t r = 0;
        for (const auto& [g, rg] : rank) {
            if (detail::extends(f, g, order)) r = std::max(r, rg + 1);
        }
        rank[f] = r;
    }
    return rank.at(LevelSet{});
}

struct CommonWitness {
    SubgridWitness witness;      // over [start, max kept)
    std::vector<std::size_t> kept;
    bool delta_dense = false;    // whether every input level had density >= delta
};

/// One witness (I_q) from the family start that fits inside D_k for at least
/// t levels at once. The level count is maximized first (largest |L'|
/// tried first), then the witness is the lexicographically least.
inline CommonWitness common_witness(const LevelFamily& levels, std::span<const std::uint64_t> targets,
                                    const ExactRational& delta, std::size_t t, const Limits& limits = {}) {
    const auto keys = levels.keys();
    if (t == 0 || t > keys.size()) throw DomainError("common_witness: t must be in [1, number of levels]");
    const GridShape empty_prefix = levels.base().prefix(levels.start());
    const PointSet everything = PointSet::full(empty_prefix);
    for (std::size_t want = keys.size(); want >= t; --want) {
        detail::ProductSearch search(levels.base().slice(levels.start(), keys.back()), targets, want, limits);
        auto found = search.run(detail::residuals_for(levels, everything, keys));
        if (found) {
            CommonWitness out{std::move(found->witness), std::move(found->satisfied), levels.dense(delta)};
            for (auto k : out.kept) {
                if (!contains_product(levels.at(k), out.witness)) {
                    throw std::logic_error("common_witness produced an invalid witness");
                }
            }
            return out;
        }
    }
    throw NotFound("common_witness: no witness covers " + std::to_string(t) + " levels");
}

}  // namespace prodense
