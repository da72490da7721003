#pragma once

// Exact arithmetic helpers. All densities and thresholds in the library are
// nonnegative rationals backed by GMP; nothing is ever rounded through a
// floating-point type.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "prodense/errors.hpp"
#include "prodense/limits.hpp"

namespace prodense {

using BigNatural = mpz_class;
using ExactRational = mpq_class;

inline ExactRational make_rational(long num, unsigned long den = 1) {
    ExactRational r(num, den);
    r.canonicalize();
    return r;
}

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

}  // namespace detail

/// Parses a decimal natural number. Signs, spaces and exponents are rejected.
inline BigNatural parse_natural(std::string_view text) {
    if (!detail::all_digits(text)) {
        throw ParseError("not a natural number: \"" + std::string(text) + "\"");
    }
    return BigNatural(std::string(text), 10);
}

/// Parses "p/q" or "p" into a rational in lowest terms; q must be positive.
inline ExactRational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    const auto num_text = text.substr(0, slash);
    const auto den_text = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!detail::all_digits(num_text) || !detail::all_digits(den_text)) {
        throw ParseError("not a rational p/q: \"" + std::string(text) + "\"");
    }
    BigNatural num(std::string(num_text), 10);
    BigNatural den(std::string(den_text), 10);
    if (den == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    ExactRational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string to_string(const BigNatural& n) { return n.get_str(10); }

/// Lowest-terms "p/q"; integers render without the denominator.
inline std::string to_string(const ExactRational& r) {
    if (r.get_den() == 1) return r.get_num().get_str(10);
    return r.get_num().get_str(10) + "/" + r.get_den().get_str(10);
}

inline BigNatural ceil(const ExactRational& r) {
    BigNatural q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline BigNatural floor(const ExactRational& r) {
    BigNatural q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

/// Number of bits in the binary representation; 0 for 0.
inline std::size_t bit_length(const BigNatural& n) {
    if (n == 0) return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

/// Smallest y with v <= 2^y: 0 for v <= 1, else bit_length(v - 1).
inline BigNatural ceil_log2(const BigNatural& v) {
    if (v <= 1) return 0;
    return BigNatural(static_cast<unsigned long>(bit_length(v - 1)));
}

inline void check_bits(const BigNatural& n, const Limits& limits, const char* what) {
    if (bit_length(n) > limits.max_value_bits) {
        throw BudgetExceeded(std::string(what) + " exceeds the bit-length budget of " +
                             std::to_string(limits.max_value_bits) + " bits");
    }
}

inline void check_bits(const ExactRational& r, const Limits& limits, const char* what) {
    check_bits(r.get_num(), limits, what);
    check_bits(r.get_den(), limits, what);
}

/// Converts to a machine integer, throwing BudgetExceeded if it does not fit.
inline std::uint64_t to_u64(const BigNatural& n, const char* what) {
    if (n < 0 || bit_length(n) > 64) {
        throw BudgetExceeded(std::string(what) + " does not fit in 64 bits");
    }
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
    return out;
}

inline BigNatural from_u64(std::uint64_t v) {
    BigNatural n;
    mpz_import(n.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
    return n;
}

inline BigNatural pow2(const BigNatural& exponent, const Limits& limits) {
    if (exponent >= limits.max_value_bits) {
        throw BudgetExceeded("2^" + to_string(exponent) + " exceeds the bit-length budget");
    }
    BigNatural out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent.get_ui());
    return out;
}

inline ExactRational pow(const ExactRational& base, unsigned long exponent) {
    BigNatural num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
    return ExactRational(num, den);  // already in lowest terms
}

/// 2^-e as a rational.
inline ExactRational inverse_pow2(unsigned long e) {
    BigNatural den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, e);
    return ExactRational(BigNatural(1), den);
}

}  // namespace prodense
