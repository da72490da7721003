#pragma once

// Extraction of full combinatorial subgrids prod I_q from dense subsets of a
// product, level by level, and the split of a level family at a cut into a
// common dense prefix pattern and dense suffix sets.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prodense/bounds.hpp"
#include "prodense/correlation.hpp"
#include "prodense/detail/product_search.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/grid.hpp"
#include "prodense/limits.hpp"

namespace prodense {

/// Sets D_k over [start, k) for finitely many levels k > start, all cut from
/// one base shape.
class LevelFamily {
public:
    LevelFamily() = default;
    LevelFamily(GridShape base, std::map<std::size_t, PointSet> levels) : base_(std::move(base)), levels_(std::move(levels)) {
        for (const auto& [k, d] : levels_) {
            if (k <= base_.start) throw DomainError("level " + std::to_string(k) + " is not above the start coordinate");
            if (k > base_.end()) throw DomainError("level " + std::to_string(k) + " exceeds the base shape");
            if (!(d.shape() == base_.prefix(k))) {
                throw DomainError("level " + std::to_string(k) + " is not over the matching prefix of the base shape");
            }
        }
    }

    const GridShape& base() const { return base_; }
    std::size_t start() const { return base_.start; }
    const std::map<std::size_t, PointSet>& levels() const { return levels_; }
    const PointSet& at(std::size_t k) const { return levels_.at(k); }

    std::vector<std::size_t> keys() const {
        std::vector<std::size_t> out;
        for (const auto& [k, d] : levels_) out.push_back(k);
        return out;
    }

    /// Every level has density at least eps.
    bool dense(const ExactRational& eps) const {
        return std::all_of(levels_.begin(), levels_.end(), [&](const auto& kv) { return density(kv.second) >= eps; });
    }

private:
    GridShape base_;
    std::map<std::size_t, PointSet> levels_;
};

enum class ExtractionMode { proof, exhaustive };

/// eps_0 = eps and eps_{q+1} = (eps_q / 4)^{m_q} for q < targets.size() - 1.
inline std::vector<ExactRational> density_schedule(const ExactRational& eps, std::span<const std::uint64_t> targets,
                                                   const Limits& limits = {}) {
    detail::require_density(eps, "density_schedule: eps");
    detail::require_targets_at_least(targets, 1);
    std::vector<ExactRational> schedule{eps};
    for (std::size_t q = 0; q + 1 < targets.size(); ++q) {
        schedule.push_back(pow(schedule.back() / 4, targets[q]));
        check_bits(schedule.back(), limits, "density_schedule");
    }
    return schedule;
}

/// What the size-guarantee hypotheses say about an extraction input.
struct ProofPreconditions {
    bool dense = false;                // density(D) >= eps
    std::vector<bool> size_ok;         // n_q >= t_bound(eps, (m_start..m_q))
    bool all() const { return dense && std::all_of(size_ok.begin(), size_ok.end(), [](bool b) { return b; }); }
};

inline ProofPreconditions proof_preconditions(const PointSet& d, std::span<const std::uint64_t> targets,
                                              const ExactRational& eps, const Limits& limits = {}) {
    const GridShape& shape = d.shape();
    ProofPreconditions out;
    out.dense = density(d) >= eps;
    for (std::size_t q = shape.start; q < shape.end(); ++q) {
        const auto prefix = targets.subspan(shape.start, q - shape.start + 1);
        bool ok = false;
        try {
            ok = ExactRational(from_u64(shape.size_at(q))) >= t_bound(eps, prefix, limits);
        } catch (const DomainError&) {
            ok = false;  // targets below 2 carry no size guarantee
        }
        out.size_ok.push_back(ok);
    }
    return out;
}

namespace detail {

inline void check_extraction_inputs(const PointSet& d, std::span<const std::uint64_t> targets) {
    const GridShape& shape = d.shape();
    if (shape.dimension() == 0) throw DomainError("extraction needs at least one coordinate");
    if (targets.size() < shape.end()) throw DomainError("targets do not cover every coordinate of D");
    for (std::size_t q = shape.start; q < shape.end(); ++q) {
        if (targets[q] == 0) throw DomainError("targets must be >= 1");
    }
}

// The m smallest members of a one-coordinate set.
inline std::vector<std::uint64_t> smallest_members(const PointSet& d, std::uint64_t m) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = d.bits().next_set(0); i < d.cardinality() && out.size() < m; i = d.bits().next_set(i + 1)) {
        out.push_back(i);
    }
    return out;
}

inline SubgridWitness extract_by_proof(const PointSet& d, std::span<const std::uint64_t> targets,
                                       const ExactRational& eps, const Limits& limits) {
    const GridShape& shape = d.shape();
    const auto schedule = density_schedule(eps, targets.subspan(shape.start, shape.dimension()), limits);
    SubgridWitness witness{shape.start, {}};
    PointSet current = d;
    for (std::size_t q = shape.start; q + 1 < shape.end(); ++q) {
        const ExactRational& level_eps = schedule[q - shape.start];
        const std::uint64_t m = targets[q];
        auto fibers = first_coordinate_fibers(current);

        // Coordinates whose fiber keeps at least half of the current density.
        std::vector<std::uint64_t> rich;
        std::vector<BitVector> events;
        for (std::uint64_t x = 0; x < fibers.size(); ++x) {
            if (density(fibers[x]) >= level_eps / 2) {
                rich.push_back(x);
                events.push_back(fibers[x].bits());
            }
        }
        if (rich.size() < m) {
            throw NotFound("proof extraction: only " + std::to_string(rich.size()) + " rich values at coordinate " +
                           std::to_string(q) + ", need " + std::to_string(m));
        }
        const EventFamily family(fibers.front().cardinality(), std::move(events));
        const ExactRational theta = level_eps / 4;
        std::vector<std::size_t> picked;
        try {
            picked = find_correlated(family, m, theta, SearchMode::greedy, limits);
        } catch (const NotFound&) {
            picked = find_correlated(family, m, theta, SearchMode::exhaustive, limits);
        }

        std::vector<std::uint64_t> subset;
        BitVector next(fibers.front().cardinality(), true);
        for (auto idx : picked) {
            subset.push_back(rich[idx]);
            next &= fibers[rich[idx]].bits();
        }
        witness.subsets.push_back(std::move(subset));
        current = PointSet::adopt(fibers.front().shape(), std::move(next));
    }
    const std::uint64_t last = targets[shape.end() - 1];
    auto final_subset = smallest_members(current, last);
    if (final_subset.size() < last) {
        throw NotFound("proof extraction: the last coordinate keeps only " + std::to_string(final_subset.size()) +
                       " values, need " + std::to_string(last));
    }
    witness.subsets.push_back(std::move(final_subset));
    return witness;
}

}  // namespace detail

/// A witness prod I_q inside D with |I_q| = targets[q] for every coordinate q
/// of D (targets are indexed by absolute coordinate).
///
/// Proof mode follows the inductive construction: at each coordinate keep the
/// values x whose fiber has density >= eps_q / 2, pick m_q of them whose
/// fibers correlate to density >= (eps_q / 4)^{m_q}, and recurse into the
/// intersection of those fibers; the last coordinate takes the smallest
/// remaining values. It is guaranteed to succeed when proof_preconditions
/// holds, and runs as a heuristic otherwise.
///
/// Exhaustive mode returns the lexicographically least witness, or throws
/// NotFound when none exists.
inline SubgridWitness extract_subgrid(const PointSet& d, std::span<const std::uint64_t> targets,
                                      const ExactRational& eps, ExtractionMode mode = ExtractionMode::proof,
                                      const Limits& limits = {}) {
    detail::check_extraction_inputs(d, targets);
    SubgridWitness witness;
    if (mode == ExtractionMode::proof) {
        detail::require_density(eps, "extract_subgrid: eps");
        witness = detail::extract_by_proof(d, targets, eps, limits);
    } else {
        detail::ProductSearch search(d.shape(), targets, 1, limits);
        std::vector<detail::LevelResidual> constraints;
        constraints.push_back({d.shape().end(), d});
        auto found = search.run(std::move(constraints));
        if (!found) throw NotFound("exhaustive extraction: no subgrid of the requested sizes lies in D");
        witness = std::move(found->witness);
    }
    if (!contains_product(d, witness)) throw std::logic_error("extraction produced an invalid witness");
    return witness;
}

/// Completeness oracle: tries every tuple of subsets in lexicographic order.
inline std::optional<SubgridWitness> brute_force_subgrid(const PointSet& d, std::span<const std::uint64_t> targets,
                                                         const Limits& limits = {}) {
    detail::check_extraction_inputs(d, targets);
    const GridShape& shape = d.shape();
    const std::size_t dims = shape.dimension();

    BigNatural tuples = 1;
    for (std::size_t q = shape.start; q < shape.end(); ++q) {
        if (targets[q] > shape.size_at(q)) return std::nullopt;
        BigNatural c;
        mpz_bin_uiui(c.get_mpz_t(), shape.size_at(q), targets[q]);
        tuples *= c;
    }
    if (tuples > from_u64(limits.max_nodes)) {
        throw BudgetExceeded("brute force over " + to_string(tuples) + " tuples exceeds the node budget");
    }

    SubgridWitness w{shape.start, {}};
    for (std::size_t j = 0; j < dims; ++j) {
        std::vector<std::uint64_t> first(targets[shape.start + j]);
        for (std::uint64_t a = 0; a < first.size(); ++a) first[a] = a;
        w.subsets.push_back(std::move(first));
    }
    // Advances one combination of {0..n-1} in lexicographic order.
    auto advance = [](std::vector<std::uint64_t>& c, std::uint64_t n) {
        const std::size_t m = c.size();
        for (std::size_t i = m; i-- > 0;) {
            if (c[i] < n - m + i) {
                ++c[i];
                for (std::size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    while (true) {
        if (contains_product(d, w)) return w;
        std::size_t j = dims;
        while (j-- > 0) {
            if (advance(w.subsets[j], shape.sizes[j])) break;
            for (std::uint64_t a = 0; a < w.subsets[j].size(); ++a) w.subsets[j][a] = a;
            if (j == 0) return std::nullopt;
        }
    }
}

/// Independent extraction on every level; a level without a witness maps to
/// nullopt.
inline std::map<std::size_t, std::optional<SubgridWitness>> extract_per_level(const LevelFamily& levels,
                                                                              std::span<const std::uint64_t> targets,
                                                                              const ExactRational& eps,
                                                                              ExtractionMode mode = ExtractionMode::proof,
                                                                              const Limits& limits = {}) {
    const auto keys = levels.keys();
    std::vector<std::optional<SubgridWitness>> found(keys.size());
    detail::parallel_for(keys.size(), limits.threads, [&](std::size_t i) {
        try {
            found[i] = extract_subgrid(levels.at(keys[i]), targets, eps, mode, limits);
        } catch (const NotFound&) {
            found[i] = std::nullopt;
        }
    });
    std::map<std::size_t, std::optional<SubgridWitness>> out;
    for (std::size_t i = 0; i < keys.size(); ++i) out.emplace(keys[i], std::move(found[i]));
    return out;
}

struct FubiniSplit {
    PointSet gamma;                 // over [start, cut)
    std::vector<std::size_t> kept;  // ascending
    LevelFamily reduced;            // over [cut, ...), one level per kept level
};

namespace detail {

struct MemberLexLess {
    bool operator()(const BitVector& a, const BitVector& b) const { return member_lex_less(a, b); }
};

struct LevelPattern {
    BitVector gamma;
    PointSet suffix;
};

// The most common prefix pattern among suffixes whose pattern has density >= theta.
inline LevelPattern dominant_pattern(const PointSet& d, std::size_t cut, const ExactRational& theta) {
    const GridShape head = d.shape().prefix(cut);
    const GridShape tail = d.shape().suffix(cut);
    const std::uint64_t r = head.cardinality();
    const std::uint64_t ys = tail.cardinality();
    const BigNatural min_count = ceil(theta * ExactRational(from_u64(r)));

    std::map<BitVector, std::vector<std::uint64_t>, MemberLexLess> groups;
    for (std::uint64_t y = 0; y < ys; ++y) {
        BitVector pattern(r);
        for (std::uint64_t x = 0; x < r; ++x) {
            if (d.bits().test(x + r * y)) pattern.set(x);
        }
        if (from_u64(pattern.count()) < min_count) continue;
        groups[std::move(pattern)].push_back(y);
    }
    auto best = groups.end();
    for (auto it = groups.begin(); it != groups.end(); ++it) {
        if (best == groups.end() || it->second.size() > best->second.size()) best = it;
    }
    if (best == groups.end()) throw NotFound("fubini_split: no suffix has a prefix pattern of density >= theta");
    return LevelPattern{best->first, PointSet::from_indices(tail, best->second)};
}

}  // namespace detail

/// Splits every level at `cut`: for each level, suffixes y are grouped by
/// their prefix pattern Gamma_y = {x : x y in D_k}; patterns of density
/// >= theta compete and the most populous one (lexicographically least on
/// ties) wins. The pattern shared by the most levels becomes Gamma, and those
/// levels are kept with their winning suffix sets.
inline FubiniSplit fubini_split(const LevelFamily& levels, std::size_t cut, const ExactRational& theta,
                                const ExactRational& eps, const Limits& limits = {}) {
    if (theta <= 0) throw DomainError("fubini_split: theta must be positive");
    detail::require_density(eps, "fubini_split: eps");
    if (theta >= eps) throw DomainError("fubini_split: theta must be < eps");
    if (cut <= levels.start() || cut > levels.base().end()) throw DomainError("fubini_split: cut outside the base shape");
    if (levels.levels().empty()) throw DomainError("fubini_split: no levels");
    const GridShape head = levels.base().prefix(cut);
    if (head.cardinality() > limits.max_cells) throw BudgetExceeded("fubini_split: prefix product exceeds the budget");

    const auto keys = levels.keys();
    for (auto k : keys) {
        if (k <= cut) throw DomainError("fubini_split: level " + std::to_string(k) + " is not above the cut");
        if (density(levels.at(k)) < eps) {
            throw NotFound("fubini_split: level " + std::to_string(k) + " has density below eps");
        }
    }

    std::vector<std::optional<detail::LevelPattern>> patterns(keys.size());
    detail::parallel_for(keys.size(), limits.threads,
                         [&](std::size_t i) { patterns[i] = detail::dominant_pattern(levels.at(keys[i]), cut, theta); });

    std::map<BitVector, std::size_t, detail::MemberLexLess> votes;
    for (const auto& p : patterns) ++votes[p->gamma];
    auto winner = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second > winner->second) winner = it;
    }

    FubiniSplit out;
    out.gamma = PointSet(head, winner->first, limits);
    std::map<std::size_t, PointSet> reduced;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!(patterns[i]->gamma == winner->first)) continue;
        out.kept.push_back(keys[i]);
        reduced.emplace(keys[i], std::move(patterns[i]->suffix));
    }
    out.reduced = LevelFamily(levels.base().suffix(cut), std::move(reduced));
    return out;
}

/// (eps - theta) / 2^r with r the prefix cardinality: the density every kept
/// suffix set is guaranteed to reach.
inline ExactRational split_density(const ExactRational& theta, const ExactRational& eps, std::uint64_t r,
                                   const Limits& limits = {}) {
    if (r >= limits.max_value_bits) throw BudgetExceeded("split_density: 2^r exceeds the bit-length budget");
    return (eps - theta) * inverse_pow2(r);
}

struct SplitExtraction {
    PointSet gamma;
    std::vector<std::size_t> kept;
    std::map<std::size_t, std::optional<SubgridWitness>> witnesses;  // over [cut, k)
};

/// fubini_split followed by per-level extraction on the reduced family at
/// the guaranteed density. Every returned witness w satisfies
/// Gamma w-product inside D_k.
inline SplitExtraction split_and_extract(const LevelFamily& levels, std::size_t cut, const ExactRational& theta,
                                         const ExactRational& eps, std::span<const std::uint64_t> targets,
                                         ExtractionMode mode = ExtractionMode::exhaustive, const Limits& limits = {}) {
    auto split = fubini_split(levels, cut, theta, eps, limits);
    const ExactRational reduced_eps = split_density(theta, eps, split.gamma.cardinality(), limits);
    SplitExtraction out{split.gamma, split.kept, extract_per_level(split.reduced, targets, reduced_eps, mode, limits)};
    for (const auto& [k, w] : out.witnesses) {
        if (w && !contains_product(levels.at(k), *w, out.gamma)) {
            throw std::logic_error("split_and_extract produced an invalid witness");
        }
    }
    return out;
}

}  // namespace prodense
