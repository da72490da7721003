#pragma once

// Threshold functions for dense-subgrid extraction and their Ackermann
// bounds. Every value is computed exactly; integer thresholds are obtained
// by taking ceilings of the rational values.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prodense/errors.hpp"
#include "prodense/exact.hpp"
#include "prodense/limits.hpp"

namespace prodense {

using Targets = std::span<const std::uint64_t>;

/// A_2 iterated `iterations` times on `argument`, held symbolically.
struct TowerRef {
    std::size_t iterations = 0;
    BigNatural argument;
};

enum class LogBase { two, natural };

namespace detail {

inline void require_density(const ExactRational& value, const char* name) {
    if (value <= 0 || value > 1) {
        throw DomainError(std::string(name) + " must lie in (0, 1], got " + to_string(value));
    }
}

inline void require_targets_at_least(Targets targets, std::uint64_t floor_value) {
    if (targets.empty()) throw DomainError("target sequence is empty");
    for (auto m : targets) {
        if (m < floor_value) {
            throw DomainError("every target must be >= " + std::to_string(floor_value) +
                              ", got " + std::to_string(m));
        }
    }
}

inline BigNatural product(Targets values) {
    BigNatural p = 1;
    for (auto v : values) p *= from_u64(v);
    return p;
}

// sum_{j<k} prod_{q=j}^{k-1} m_q for the first k entries.
inline BigNatural suffix_product_sum(Targets values) {
    BigNatural sum = 0;
    BigNatural running = 1;
    for (std::size_t j = values.size(); j-- > 0;) {
        running *= from_u64(values[j]);
        sum += running;
    }
    return sum;
}

inline unsigned long small_exponent(const BigNatural& e, const Limits& limits, const char* what) {
    if (e > limits.max_value_bits) {
        throw BudgetExceeded(std::string(what) + " exponent " + to_string(e) +
                             " exceeds the bit-length budget");
    }
    return e.get_ui();
}

}  // namespace detail

/// ceil(k(k-1) / (2(eps^k - theta^k))) for 0 < theta < eps <= 1 and k >= 2.
inline BigNatural sigma(const ExactRational& theta, const ExactRational& eps, std::uint64_t k) {
    if (theta <= 0) throw DomainError("sigma: theta must be positive");
    detail::require_density(eps, "sigma: eps");
    if (theta >= eps) throw DomainError("sigma: theta must be < eps");
    if (k < 2) throw DomainError("sigma: k must be >= 2");
    const ExactRational gap = pow(eps, k) - pow(theta, k);
    const ExactRational value = ExactRational(from_u64(k) * from_u64(k - 1)) / (2 * gap);
    return ceil(value);
}

/// The reduced density eps' used by t_bound for the last coordinate.
inline ExactRational eps_prime(const ExactRational& eps, Targets targets, const Limits& limits = {}) {
    detail::require_density(eps, "eps_prime: eps");
    detail::require_targets_at_least(targets, 1);
    const auto head = targets.first(targets.size() - 1);
    if (head.empty()) return eps;
    const BigNatural pm = detail::product(head);
    const BigNatural spm = detail::suffix_product_sum(head);
    const auto den_bits = static_cast<unsigned long>(bit_length(eps.get_den()));
    detail::small_exponent(pm * den_bits + 2 * spm, limits, "eps_prime");
    return pow(eps, pm.get_ui()) * inverse_pow2(2 * spm.get_ui());
}

/// Exact rational value of the per-coordinate size threshold.
inline ExactRational t_bound(const ExactRational& eps, Targets targets, const Limits& limits = {}) {
    detail::require_density(eps, "t_bound: eps");
    detail::require_targets_at_least(targets, 2);
    const ExactRational reduced = eps_prime(eps, targets, limits);
    const BigNatural s = sigma(reduced / 4, reduced / 2, targets.back());
    ExactRational out = ExactRational(2) / reduced * ExactRational(s);
    out.canonicalize();
    check_bits(out, limits, "t_bound");
    return out;
}

/// The density index (1/8)((eps - theta)/2^r)^2 used by q_bound.
inline ExactRational q_index(const ExactRational& theta, const ExactRational& eps, const BigNatural& r,
                             const Limits& limits = {}) {
    if (theta <= 0) throw DomainError("q_bound: theta must be positive");
    detail::require_density(eps, "q_bound: eps");
    if (theta >= eps) throw DomainError("q_bound: theta must be < eps");
    if (r < 1) throw DomainError("q_bound: r must be >= 1");
    const unsigned long shift = detail::small_exponent(2 * r + 3, limits, "q_bound");
    const ExactRational gap = eps - theta;
    return gap * gap * inverse_pow2(shift);
}

inline ExactRational q_bound(const ExactRational& theta, const ExactRational& eps, const BigNatural& r,
                             Targets targets, const Limits& limits = {}) {
    return t_bound(q_index(theta, eps, r, limits), targets, limits);
}

/// Minimal s with 2^(1-s) <= delta.
inline std::uint64_t s_delta(const ExactRational& delta) {
    detail::require_density(delta, "s_delta: delta");
    std::uint64_t s = 1;
    ExactRational scaled = delta;  // delta * 2^(s-1)
    while (scaled < 1) {
        scaled *= 2;
        ++s;
    }
    return s;
}

/// The dyadic rationals i/2^s for 0 < i <= 2^s, increasing.
inline std::vector<ExactRational> dyadic_grid(std::uint64_t s, const Limits& limits = {}) {
    if (s >= 63 || (std::uint64_t{1} << s) > limits.max_nodes) {
        throw BudgetExceeded("dyadic grid of level " + std::to_string(s) + " is too large");
    }
    const std::uint64_t count = std::uint64_t{1} << s;
    std::vector<ExactRational> grid;
    grid.reserve(count);
    const ExactRational step = inverse_pow2(s);
    for (std::uint64_t i = 1; i <= count; ++i) grid.push_back(step * ExactRational(from_u64(i)));
    return grid;
}

/// Size threshold for the next coordinate given the targets (m_0..m_k) and
/// the sizes (n_0..n_{k-1}) already fixed. With `prune` the maxima over the
/// dyadic grids are taken at their known argmax (T decreases in its density
/// index); without it the grids are enumerated in full.
inline ExactRational v_delta(const ExactRational& delta, Targets targets, std::span<const BigNatural> sizes,
                             bool prune = true, const Limits& limits = {}) {
    detail::require_density(delta, "v_delta: delta");
    detail::require_targets_at_least(targets, 2);
    if (sizes.size() + 1 != targets.size()) {
        throw DomainError("v_delta: expected " + std::to_string(targets.size() - 1) + " sizes, got " +
                          std::to_string(sizes.size()));
    }
    for (const auto& n : sizes) {
        if (n < 1) throw DomainError("v_delta: sizes must be >= 1");
    }
    const std::uint64_t s = s_delta(delta);
    const std::size_t k = sizes.size();

    if (k == 0) {
        if (prune) return t_bound(inverse_pow2(s), targets, limits);
        ExactRational best = 0;
        for (const auto& e : dyadic_grid(s, limits)) best = std::max(best, t_bound(e, targets, limits));
        return best;
    }

    ExactRational best = t_bound(inverse_pow2(s), targets, limits);
    const ExactRational step = inverse_pow2(s + k);
    std::vector<ExactRational> grid;
    if (!prune) grid = dyadic_grid(s + k, limits);
    BigNatural r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r *= sizes[i - 1];
        const Targets tail = targets.subspan(i);
        if (prune) {
            best = std::max(best, q_bound(step, 2 * step, r, tail, limits));
            continue;
        }
        for (std::size_t a = 0; a < grid.size(); ++a) {
            for (std::size_t b = a + 1; b < grid.size(); ++b) {
                best = std::max(best, q_bound(grid[a], grid[b], r, tail, limits));
            }
        }
    }
    return best;
}

/// f of every prefix of targets: f_0 = ceil(V((m_0), ())), and f_k feeds the
/// earlier f values back in as the sizes.
inline std::vector<BigNatural> f_chain(const ExactRational& delta, Targets targets, const Limits& limits = {},
                                       bool prune = true) {
    detail::require_density(delta, "f_chain: delta");
    detail::require_targets_at_least(targets, 2);
    std::vector<BigNatural> values;
    values.reserve(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        BigNatural next = ceil(v_delta(delta, targets.first(k + 1), values, prune, limits));
        check_bits(next, limits, "f_chain");
        values.push_back(std::move(next));
    }
    return values;
}

namespace detail {

inline BigNatural ackermann_step(std::size_t n, const BigNatural& x, const Limits& limits);

// A_n applied `times` times to `start`.
inline BigNatural ackermann_iterate(std::size_t n, BigNatural times, BigNatural start, const Limits& limits) {
    while (times > 0) {
        start = ackermann_step(n, start, limits);
        --times;
    }
    return start;
}

inline BigNatural ackermann_step(std::size_t n, const BigNatural& x, const Limits& limits) {
    switch (n) {
        case 0:
            if (x == 0) return 1;
            if (x == 1) return 2;
            return x + 2;
        case 1:
            return x == 0 ? BigNatural(1) : BigNatural(2 * x);
        case 2:
            return pow2(x, limits);
        default:
            return ackermann_iterate(n - 1, x, 1, limits);
    }
}

}  // namespace detail

/// A_n(x) of the Ackermann hierarchy A_0(x) = x + 2 (x >= 2), A_{n+1}(x) =
/// A_n^(x)(1). Levels 1 and 2 use the closed forms 2x and 2^x.
inline BigNatural ackermann(std::size_t n, const BigNatural& x, const Limits& limits = {}) {
    if (x < 0) throw DomainError("ackermann: argument must be a natural number");
    BigNatural out = detail::ackermann_step(n, x, limits);
    check_bits(out, limits, "ackermann");
    return out;
}

/// v <= A_2^(t.iterations)(t.argument), decided by repeated ceil_log2 so the
/// tower is never built.
inline bool leq_tower(BigNatural v, const TowerRef& t) {
    for (std::size_t i = 0; i < t.iterations; ++i) {
        if (v <= 1) return true;
        v = ceil_log2(v);
    }
    return v <= t.argument;
}

namespace detail {

// Decides e^p >= x for rational x > 0 using Taylor partial sums with a
// Lagrange remainder bound (e^p < 3^p). e^p is irrational for p >= 1, so the
// refinement terminates.
inline bool exp_at_least(std::uint64_t p, const ExactRational& x) {
    if (p == 0) return x <= 1;
    const ExactRational pq(from_u64(p));
    ExactRational term = 1;
    ExactRational lower = 1;
    const ExactRational three_pow = pow(ExactRational(3), p);
    for (unsigned long n = 1;; ++n) {
        term = term * pq / ExactRational(from_u64(n));
        lower += term;
        const ExactRational remainder = term * pq / ExactRational(from_u64(n + 1)) * three_pow;
        if (x <= lower) return true;
        if (x > lower + remainder) return false;
    }
}

}  // namespace detail

/// ceil(log(1/eps)), base 2 unless LogBase::natural is requested.
inline std::uint64_t p_eps(const ExactRational& eps, LogBase base = LogBase::two) {
    detail::require_density(eps, "p_eps: eps");
    const ExactRational inverse = 1 / eps;
    std::uint64_t p = 0;
    if (base == LogBase::two) {
        ExactRational power = 1;
        while (power < inverse) {
            power *= 2;
            ++p;
        }
        return p;
    }
    while (!detail::exp_at_least(p, inverse)) ++p;
    return p;
}

struct Lemma41Check {
    bool holds = false;
    ExactRational left;   // t_bound(eps, targets)
    BigNatural right;     // A_2(5 p pm_k)
    std::uint64_t p = 0;
};

/// Tests t_bound(eps, targets) <= A_2(5 p_eps prod(targets)).
inline Lemma41Check check_lemma41(const ExactRational& eps, Targets targets, LogBase base = LogBase::two,
                                  const Limits& limits = {}) {
    detail::require_density(eps, "check_lemma41: eps");
    if (eps > ExactRational(1, 2)) throw DomainError("check_lemma41: eps must be <= 1/2");
    detail::require_targets_at_least(targets, 2);
    Lemma41Check out;
    out.p = p_eps(eps, base);
    out.left = t_bound(eps, targets, limits);
    out.right = ackermann(2, from_u64(5 * out.p) * detail::product(targets), limits);
    out.holds = out.left <= ExactRational(out.right);
    return out;
}

struct Prop43Row {
    std::size_t k = 0;
    BigNatural f;
    TowerRef bound;
    bool holds = false;
};

/// For each prefix length k, tests f_k <= A_2^(1+k)(5 s_delta pm_k).
inline std::vector<Prop43Row> check_prop43(const ExactRational& delta, Targets targets, const Limits& limits = {}) {
    detail::require_density(delta, "check_prop43: delta");
    if (delta > ExactRational(1, 2)) throw DomainError("check_prop43: delta must be <= 1/2");
    detail::require_targets_at_least(targets, 2);
    const auto f = f_chain(delta, targets, limits);
    const BigNatural s = from_u64(s_delta(delta));
    std::vector<Prop43Row> rows;
    BigNatural pm = 1;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        pm *= from_u64(targets[k]);
        Prop43Row row;
        row.k = k;
        row.f = f[k];
        row.bound = TowerRef{k + 1, 5 * s * pm};
        row.holds = leq_tower(row.f, row.bound);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace prodense
