#pragma once

// Correlated subfamilies: among events of measure >= eps, find k whose common
// intersection has measure >= theta^k. Once the family has at least
// sigma(theta, eps, k) members such a subfamily always exists; the search
// here finds one directly instead of following the averaging argument.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prodense/bitvector.hpp"
#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/limits.hpp"

namespace prodense {

/// Events over a finite probability space {0, ..., omega_size - 1}. The
/// measure is uniform unless point weights are given; weights must sum to 1.
class EventFamily {
public:
    EventFamily(std::uint64_t omega_size, std::vector<BitVector> events, std::vector<ExactRational> weights = {})
        : omega_(omega_size), events_(std::move(events)) {
        if (omega_ == 0) throw DomainError("event family: the ground set is empty");
        for (const auto& e : events_) {
            if (e.size() != omega_) throw DomainError("event family: event length differs from the ground set");
        }
        if (weights.empty()) return;
        if (weights.size() != omega_) throw DomainError("event family: one weight per point is required");
        // Rewrite the weights over a common denominator so measures are
        // integer sums.
        BigNatural den = 1;
        for (const auto& w : weights) {
            if (w < 0) throw DomainError("event family: negative weight");
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w.get_den_mpz_t());
        }
        ExactRational total = 0;
        weight_numerators_.reserve(omega_);
        for (const auto& w : weights) {
            total += w;
            weight_numerators_.push_back(w.get_num() * (den / w.get_den()));
        }
        if (total != 1) throw DomainError("event family: weights sum to " + to_string(total) + ", not 1");
        weight_denominator_ = den;
    }

    std::uint64_t omega_size() const { return omega_; }
    std::size_t size() const { return events_.size(); }
    const BitVector& event(std::size_t i) const { return events_.at(i); }
    bool uniform() const { return weight_numerators_.empty(); }

    /// Integer score proportional to the measure: the point count for the
    /// uniform measure, otherwise the weight numerator sum.
    BigNatural score(const BitVector& set) const {
        if (uniform()) return from_u64(set.count());
        BigNatural sum = 0;
        set.for_each_set([&](std::uint64_t i) { sum += weight_numerators_[i]; });
        return sum;
    }

    /// The score denominator: mu(S) = score(S) / scale().
    BigNatural scale() const { return uniform() ? from_u64(omega_) : weight_denominator_; }

    ExactRational measure(const BitVector& set) const {
        ExactRational r(score(set), scale());
        r.canonicalize();
        return r;
    }

    /// Smallest integer score whose measure is >= value.
    BigNatural score_threshold(const ExactRational& value) const { return ceil(value * ExactRational(scale())); }

private:
    std::uint64_t omega_;
    std::vector<BitVector> events_;
    std::vector<BigNatural> weight_numerators_;
    BigNatural weight_denominator_ = 1;
};

enum class SearchMode { exhaustive, greedy };

namespace detail {

inline void check_indices(const EventFamily& fam, std::span<const std::size_t> indices) {
    if (indices.empty()) throw DomainError("intersection of an empty index set");
    for (auto i : indices) {
        if (i >= fam.size()) throw DomainError("event index " + std::to_string(i) + " out of range");
    }
}

inline BitVector intersect_events(const EventFamily& fam, std::span<const std::size_t> indices) {
    BitVector acc(fam.omega_size(), true);
    for (auto i : indices) acc &= fam.event(i);
    return acc;
}

class NodeCounter {
public:
    explicit NodeCounter(std::uint64_t budget) : budget_(budget) {}
    void tick() {
        if (++nodes_ > budget_) throw BudgetExceeded("search exceeded the node budget of " + std::to_string(budget_));
    }
    std::uint64_t nodes() const { return nodes_; }

private:
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
};

// Lexicographic DFS over k-subsets; partial intersections only shrink, so a
// branch is cut as soon as its score drops below the threshold.
inline bool correlated_dfs(const EventFamily& fam, std::size_t k, const BigNatural& threshold, std::size_t from,
                           const BitVector& current, std::vector<std::size_t>& chosen, NodeCounter& counter) {
    if (chosen.size() == k) return true;
    const std::size_t remaining = k - chosen.size();
    for (std::size_t i = from; i + remaining <= fam.size(); ++i) {
        counter.tick();
        BitVector next = current;
        next &= fam.event(i);
        if (fam.score(next) < threshold) continue;
        chosen.push_back(i);
        if (correlated_dfs(fam, k, threshold, i + 1, next, chosen, counter)) return true;
        chosen.pop_back();
    }
    return false;
}

inline std::optional<std::vector<std::size_t>> greedy_correlated(const EventFamily& fam, std::size_t k,
                                                                 const BigNatural& threshold) {
    std::size_t best_i = 0, best_j = 1;
    BigNatural best = -1;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        for (std::size_t j = i + 1; j < fam.size(); ++j) {
            BigNatural s;
            if (fam.uniform()) {
                s = from_u64(fam.event(i).count_and(fam.event(j)));
            } else {
                BitVector both = fam.event(i);
                both &= fam.event(j);
                s = fam.score(both);
            }
            if (s > best) {
                best = std::move(s);
                best_i = i;
                best_j = j;
            }
        }
    }
    std::vector<std::size_t> chosen{best_i, best_j};
    std::vector<bool> used(fam.size(), false);
    used[best_i] = used[best_j] = true;
    BitVector current = fam.event(best_i);
    current &= fam.event(best_j);
    while (chosen.size() < k) {
        std::size_t pick = fam.size();
        BigNatural pick_score = -1;
        for (std::size_t l = 0; l < fam.size(); ++l) {
            if (used[l]) continue;
            BitVector next = current;
            next &= fam.event(l);
            BigNatural s = fam.score(next);
            if (s > pick_score) {
                pick_score = std::move(s);
                pick = l;
            }
        }
        used[pick] = true;
        chosen.push_back(pick);
        current &= fam.event(pick);
    }
    if (fam.score(current) < threshold) return std::nullopt;
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace detail

/// mu of the intersection of the events with the given indices.
inline ExactRational intersection_measure(const EventFamily& fam, std::span<const std::size_t> indices) {
    detail::check_indices(fam, indices);
    return fam.measure(detail::intersect_events(fam, indices));
}

/// A k-subset (sorted, 0-based) whose intersection has measure >= theta^k.
/// Exhaustive mode returns the lexicographically least such subset and
/// throws NotFound only when none exists; greedy mode may miss one. For
/// k = 1 the first event of measure >= theta is returned.
inline std::vector<std::size_t> find_correlated(const EventFamily& fam, std::size_t k, const ExactRational& theta,
                                                SearchMode mode = SearchMode::exhaustive, const Limits& limits = {}) {
    if (k == 0) throw DomainError("find_correlated: k must be >= 1");
    if (theta < 0) throw DomainError("find_correlated: theta must be nonnegative");
    if (k > fam.size()) throw NotFound("find_correlated: fewer than k events");
    const BigNatural threshold = fam.score_threshold(pow(theta, k));
    if (k == 1) {
        for (std::size_t i = 0; i < fam.size(); ++i) {
            if (fam.score(fam.event(i)) >= threshold) return {i};
        }
        throw NotFound("find_correlated: no event reaches theta");
    }
    if (mode == SearchMode::greedy) {
        if (auto found = detail::greedy_correlated(fam, k, threshold)) return *found;
        throw NotFound("find_correlated: greedy search found no correlated subset");
    }
    detail::NodeCounter counter(limits.max_nodes);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    if (detail::correlated_dfs(fam, k, threshold, 0, BitVector(fam.omega_size(), true), chosen, counter)) return chosen;
    throw NotFound("find_correlated: no " + std::to_string(k) + "-subset reaches theta^k");
}

/// The k-subset of largest intersection measure, lexicographically least
/// among ties, found by branch and bound.
inline std::pair<std::vector<std::size_t>, ExactRational> best_correlated(const EventFamily& fam, std::size_t k,
                                                                          const Limits& limits = {}) {
    if (k == 0 || k > fam.size()) throw DomainError("best_correlated: need 1 <= k <= N");
    detail::NodeCounter counter(limits.max_nodes);
    std::vector<std::size_t> chosen, best_set;
    BigNatural best = -1;

    auto dfs = [&](auto&& self, std::size_t from, const BitVector& current) -> void {
        if (chosen.size() == k) {
            BigNatural s = fam.score(current);
            if (s > best) {
                best = std::move(s);
                best_set = chosen;
            }
            return;
        }
        const std::size_t remaining = k - chosen.size();
        for (std::size_t i = from; i + remaining <= fam.size(); ++i) {
            counter.tick();
            BitVector next = current;
            next &= fam.event(i);
            // A completion never scores above its partial intersection, and a
            // later tie never replaces an earlier one.
            if (best >= 0 && fam.score(next) <= best) continue;
            chosen.push_back(i);
            self(self, i + 1, next);
            chosen.pop_back();
        }
    };
    dfs(dfs, 0, BitVector(fam.omega_size(), true));
    ExactRational measure(best, fam.scale());
    measure.canonicalize();
    return {best_set, measure};
}

}  // namespace prodense
