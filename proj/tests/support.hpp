#pragma once

// Helpers shared by the test suites: seeded random inputs and small
// brute-force oracles that do not reuse the library's search code.

#include <cstdint>
#include <random>
#include <vector>

#include "prodense.hpp"

namespace prodense::fixtures {

using Rng = std::mt19937_64;

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline BitVector random_bits(Rng& rng, std::uint64_t size, std::uint64_t per_mille) {
    BitVector bits(size);
    for (std::uint64_t i = 0; i < size; ++i) {
        if (uniform(rng, 0, 999) < per_mille) bits.set(i);
    }
    return bits;
}

inline PointSet random_set(Rng& rng, const GridShape& shape, std::uint64_t per_mille) {
    return PointSet(shape, random_bits(rng, shape.cardinality(), per_mille));
}

inline GridShape random_shape(Rng& rng, std::size_t start, std::size_t max_dims, std::uint64_t max_size) {
    std::vector<std::uint64_t> sizes(uniform(rng, 1, max_dims));
    for (auto& n : sizes) n = uniform(rng, 1, max_size);
    return GridShape(start, sizes);
}

/// Members of a set as points.
inline std::vector<Point> points(const PointSet& d) {
    std::vector<Point> out;
    for (auto i : d.indices()) out.push_back(point_of(d.shape(), i));
    return out;
}

/// {(i, j) : i != j} on an n x n grid.
inline PointSet off_diagonal(std::uint64_t n) {
    const GridShape shape(0, {n, n});
    std::vector<std::uint64_t> members;
    for (std::uint64_t j = 0; j < n; ++j) {
        for (std::uint64_t i = 0; i < n; ++i) {
            if (i != j) members.push_back(i + n * j);
        }
    }
    return PointSet::from_indices(shape, members);
}

/// All m-subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::uint64_t>> combinations(std::uint64_t n, std::uint64_t m) {
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> c;
    auto rec = [&](auto&& self, std::uint64_t from) -> void {
        if (c.size() == m) {
            out.push_back(c);
            return;
        }
        for (std::uint64_t x = from; x < n; ++x) {
            c.push_back(x);
            self(self, x + 1);
            c.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// Every witness tuple over a shape with the given per-coordinate sizes, in
/// lexicographic order.
inline std::vector<SubgridWitness> all_witnesses(const GridShape& shape, std::span<const std::uint64_t> absolute_targets) {
    std::vector<SubgridWitness> out{SubgridWitness{shape.start, {}}};
    for (std::size_t q = shape.start; q < shape.end(); ++q) {
        std::vector<SubgridWitness> next;
        for (const auto& w : out) {
            for (const auto& c : combinations(shape.size_at(q), absolute_targets[q])) {
                SubgridWitness longer = w;
                longer.subsets.push_back(c);
                next.push_back(std::move(longer));
            }
        }
        out = std::move(next);
    }
    return out;
}

/// Direct membership check of Gamma x prod I_q, enumerating every point.
inline bool product_inside(const PointSet& d, const SubgridWitness& w, const PointSet* gamma = nullptr) {
    const GridShape& shape = d.shape();
    std::vector<Point> heads{Point{shape.start, {}}};
    if (gamma) heads = points(*gamma);
    const std::size_t dims = shape.end() - w.start;
    std::vector<std::vector<std::uint64_t>> tails{{}};
    for (std::size_t j = 0; j < dims; ++j) {
        std::vector<std::vector<std::uint64_t>> next;
        for (const auto& t : tails) {
            for (auto x : w.subsets[j]) {
                auto longer = t;
                longer.push_back(x);
                next.push_back(std::move(longer));
            }
        }
        tails = std::move(next);
    }
    for (const auto& h : heads) {
        for (const auto& t : tails) {
            Point p = h;
            p.coords.insert(p.coords.end(), t.begin(), t.end());
            if (!d.contains(p)) return false;
        }
    }
    return true;
}

}  // namespace prodense::fixtures
