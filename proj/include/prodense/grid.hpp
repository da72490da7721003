#pragma once

// Finite product spaces prod_{q=start}^{end-1} {0, ..., n_q - 1} and their
// subsets. Points are encoded in mixed radix with the first coordinate least
// significant, so the fibers over a prefix are contiguous blocks.

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

/// The coordinate range [start, start + sizes.size()) with the size of every
/// coordinate set.
struct GridShape {
    std::size_t start = 0;
    std::vector<std::uint64_t> sizes;

    GridShape() = default;
    GridShape(std::size_t start_coordinate, std::vector<std::uint64_t> coordinate_sizes)
        : start(start_coordinate), sizes(std::move(coordinate_sizes)) {
        for (auto n : sizes) {
            if (n == 0) throw DomainError("coordinate sizes must be >= 1");
        }
    }

    std::size_t end() const { return start + sizes.size(); }
    std::size_t dimension() const { return sizes.size(); }
    std::uint64_t size_at(std::size_t coordinate) const { return sizes.at(coordinate - start); }

    /// Number of points; the empty product has one point.
    std::uint64_t cardinality() const {
        std::uint64_t card = 1;
        for (auto n : sizes) {
            if (n != 0 && card > (std::uint64_t{1} << 62) / n) throw BudgetExceeded("grid cardinality overflows");
            card *= n;
        }
        return card;
    }

    /// Coordinates [from, to) of this shape.
    GridShape slice(std::size_t from, std::size_t to) const {
        if (from < start || to > end() || from > to) {
            throw DomainError("slice [" + std::to_string(from) + "," + std::to_string(to) +
                              ") outside shape [" + std::to_string(start) + "," + std::to_string(end()) + ")");
        }
        return GridShape(from, std::vector<std::uint64_t>(sizes.begin() + static_cast<std::ptrdiff_t>(from - start),
                                                          sizes.begin() + static_cast<std::ptrdiff_t>(to - start)));
    }

    GridShape prefix(std::size_t cut) const { return slice(start, cut); }
    GridShape suffix(std::size_t cut) const { return slice(cut, end()); }

    friend bool operator==(const GridShape&, const GridShape&) = default;
};

struct Point {
    std::size_t start = 0;
    std::vector<std::uint64_t> coords;

    std::size_t end() const { return start + coords.size(); }
    friend bool operator==(const Point&, const Point&) = default;
};

inline void check_point(const GridShape& shape, const Point& p) {
    if (p.start != shape.start || p.coords.size() != shape.sizes.size()) {
        throw DomainError("point does not match the shape's coordinate range");
    }
    for (std::size_t q = 0; q < p.coords.size(); ++q) {
        if (p.coords[q] >= shape.sizes[q]) throw DomainError("point coordinate out of range");
    }
}

inline std::uint64_t index_of(const GridShape& shape, const Point& p) {
    check_point(shape, p);
    std::uint64_t index = 0;
    std::uint64_t stride = 1;
    for (std::size_t q = 0; q < p.coords.size(); ++q) {
        index += p.coords[q] * stride;
        stride *= shape.sizes[q];
    }
    return index;
}

inline Point point_of(const GridShape& shape, std::uint64_t index) {
    if (index >= shape.cardinality()) throw DomainError("index out of range for shape");
    Point p{shape.start, {}};
    p.coords.reserve(shape.sizes.size());
    for (auto n : shape.sizes) {
        p.coords.push_back(index % n);
        index /= n;
    }
    return p;
}

/// x restricted to its coordinates below c.
inline Point restrict(const Point& x, std::size_t c) {
    if (c <= x.start || c > x.end()) throw DomainError("restrict: cut outside (start, end]");
    return Point{x.start, std::vector<std::uint64_t>(x.coords.begin(),
                                                     x.coords.begin() + static_cast<std::ptrdiff_t>(c - x.start))};
}

inline Point concat_points(const Point& x, const Point& y) {
    if (x.end() != y.start) throw DomainError("concat: coordinate ranges are not contiguous");
    Point z = x;
    z.coords.insert(z.coords.end(), y.coords.begin(), y.coords.end());
    return z;
}

/// An immutable subset of a grid.
class PointSet {
public:
    PointSet() = default;

    PointSet(GridShape shape, BitVector bits, const Limits& limits = {}) : shape_(std::move(shape)), bits_(std::move(bits)) {
        const auto card = checked_cardinality(shape_, limits);
        if (bits_.size() != card) throw DomainError("bitset length does not match the shape cardinality");
    }

    static PointSet empty(GridShape shape, const Limits& limits = {}) {
        const auto card = checked_cardinality(shape, limits);
        return PointSet(std::move(shape), BitVector(card), limits);
    }

    static PointSet full(GridShape shape, const Limits& limits = {}) {
        const auto card = checked_cardinality(shape, limits);
        return PointSet(std::move(shape), BitVector(card, true), limits);
    }

    static PointSet from_indices(GridShape shape, std::span<const std::uint64_t> indices, const Limits& limits = {}) {
        const auto card = checked_cardinality(shape, limits);
        BitVector bits(card);
        for (auto i : indices) {
            if (i >= card) throw DomainError("point index " + std::to_string(i) + " out of range");
            bits.set(i);
        }
        return PointSet(std::move(shape), std::move(bits), limits);
    }

    static PointSet from_points(GridShape shape, std::span<const Point> points, const Limits& limits = {}) {
        std::vector<std::uint64_t> indices;
        indices.reserve(points.size());
        for (const auto& p : points) indices.push_back(index_of(shape, p));
        return from_indices(std::move(shape), indices, limits);
    }

    /// Wraps bits derived from already-validated sets; only the length is checked.
    static PointSet adopt(GridShape shape, BitVector bits) {
        if (bits.size() != shape.cardinality()) throw DomainError("bitset length does not match the shape cardinality");
        PointSet out;
        out.shape_ = std::move(shape);
        out.bits_ = std::move(bits);
        return out;
    }

    const GridShape& shape() const { return shape_; }
    const BitVector& bits() const { return bits_; }
    std::uint64_t cardinality() const { return bits_.size(); }
    std::uint64_t count() const { return bits_.count(); }
    bool contains(std::uint64_t index) const { return index < bits_.size() && bits_.test(index); }
    bool contains(const Point& p) const { return bits_.test(index_of(shape_, p)); }

    std::vector<std::uint64_t> indices() const {
        std::vector<std::uint64_t> out;
        bits_.for_each_set([&](std::uint64_t i) { out.push_back(i); });
        return out;
    }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    static std::uint64_t checked_cardinality(const GridShape& shape, const Limits& limits) {
        const auto card = shape.cardinality();
        if (card > limits.max_cells) {
            throw BudgetExceeded("point set of " + std::to_string(card) + " cells exceeds the budget of " +
                                 std::to_string(limits.max_cells));
        }
        return card;
    }

    GridShape shape_;
    BitVector bits_;
};

inline ExactRational density(const PointSet& d) {
    ExactRational r(from_u64(d.count()), from_u64(d.cardinality()));
    r.canonicalize();
    return r;
}

inline PointSet intersection(const PointSet& a, const PointSet& b) {
    if (!(a.shape() == b.shape())) throw DomainError("intersection of sets over different shapes");
    BitVector bits = a.bits();
    bits &= b.bits();
    return PointSet::adopt(a.shape(), std::move(bits));
}

/// {y : x concatenated with y lies in D}, for x over a prefix of D's range.
/// A prefix covering every coordinate yields a set over the empty product.
inline PointSet fiber(const PointSet& d, const Point& x) {
    const GridShape& shape = d.shape();
    if (x.start != shape.start || x.end() > shape.end()) throw DomainError("fiber: point is not over a prefix of D");
    const GridShape head = shape.prefix(x.end());
    const GridShape tail = shape.suffix(x.end());
    const std::uint64_t offset = index_of(head, x);
    const std::uint64_t stride = head.cardinality();
    const std::uint64_t count = tail.cardinality();
    BitVector bits(count);
    for (std::uint64_t j = 0; j < count; ++j) {
        if (d.bits().test(offset + stride * j)) bits.set(j);
    }
    return PointSet::adopt(tail, std::move(bits));
}

/// The fibers over every value of the first coordinate, in one pass.
inline std::vector<PointSet> first_coordinate_fibers(const PointSet& d) {
    const GridShape& shape = d.shape();
    if (shape.dimension() == 0) throw DomainError("fibers of a set over the empty product");
    const std::uint64_t n = shape.sizes.front();
    const GridShape tail = shape.suffix(shape.start + 1);
    const std::uint64_t count = tail.cardinality();
    std::vector<BitVector> bits(n, BitVector(count));
    d.bits().for_each_set([&](std::uint64_t i) { bits[i % n].set(i / n); });
    std::vector<PointSet> out;
    out.reserve(n);
    for (auto& b : bits) out.push_back(PointSet::adopt(tail, std::move(b)));
    return out;
}

/// A concatenated with B = {x y : x in A, y in B}.
inline PointSet concat_sets(const PointSet& a, const PointSet& b, const Limits& limits = {}) {
    if (a.shape().end() != b.shape().start) throw DomainError("concat_sets: coordinate ranges are not contiguous");
    GridShape shape = a.shape();
    shape.sizes.insert(shape.sizes.end(), b.shape().sizes.begin(), b.shape().sizes.end());
    PointSet::empty(shape, limits);  // budget check before allocating
    const std::uint64_t stride = a.cardinality();
    BitVector bits(shape.cardinality());
    const auto a_members = a.indices();
    b.bits().for_each_set([&](std::uint64_t j) {
        for (auto i : a_members) bits.set(i + stride * j);
    });
    return PointSet(std::move(shape), std::move(bits), limits);
}

/// Coordinate subsets (I_q) for q = start, start + 1, ...; each sorted and
/// duplicate-free.
struct SubgridWitness {
    std::size_t start = 0;
    std::vector<std::vector<std::uint64_t>> subsets;

    std::size_t end() const { return start + subsets.size(); }
    friend bool operator==(const SubgridWitness&, const SubgridWitness&) = default;
    friend auto operator<=>(const SubgridWitness&, const SubgridWitness&) = default;
};

/// Checks that each I_q is strictly increasing, inside its coordinate set, and
/// (when targets are given) of the demanded size. targets[j] applies to
/// coordinate w.start + j.
inline void check_witness(const SubgridWitness& w, const GridShape& shape,
                          std::span<const std::uint64_t> targets = {}) {
    if (w.start < shape.start || w.end() > shape.end()) throw DomainError("witness outside the shape's range");
    for (std::size_t j = 0; j < w.subsets.size(); ++j) {
        const auto& subset = w.subsets[j];
        const std::uint64_t n = shape.size_at(w.start + j);
        for (std::size_t a = 0; a < subset.size(); ++a) {
            if (subset[a] >= n) throw DomainError("witness value out of range");
            if (a > 0 && subset[a] <= subset[a - 1]) throw DomainError("witness subset is not strictly increasing");
        }
        if (j < targets.size() && subset.size() != targets[j]) {
            throw DomainError("witness subset at coordinate " + std::to_string(w.start + j) + " has size " +
                              std::to_string(subset.size()) + ", expected " + std::to_string(targets[j]));
        }
    }
}

/// True iff (gamma concatenated with) prod I_q lies inside D. Without gamma the
/// witness must start at D's first coordinate; with gamma it starts where
/// gamma's range ends. Only the witness coordinates below D's end are used.
inline bool contains_product(const PointSet& d, const SubgridWitness& w, const PointSet* gamma = nullptr) {
    const GridShape& shape = d.shape();
    std::uint64_t head_card = 1;
    std::vector<std::uint64_t> heads{0};
    if (gamma) {
        if (gamma->shape().start != shape.start || gamma->shape().end() > shape.end() ||
            !(gamma->shape() == shape.prefix(gamma->shape().end()))) {
            throw DomainError("contains_product: gamma is not over a prefix of D");
        }
        head_card = gamma->cardinality();
        heads = gamma->indices();
    }
    const std::size_t cut = gamma ? gamma->shape().end() : shape.start;
    if (w.start != cut || w.end() < shape.end()) throw DomainError("contains_product: witness does not align with D");
    const std::size_t dims = shape.end() - cut;
    const SubgridWitness used{w.start, {w.subsets.begin(), w.subsets.begin() + static_cast<std::ptrdiff_t>(dims)}};
    check_witness(used, shape.suffix(cut));

    // Odometer over prod I_q for the coordinates [cut, end).
    for (std::size_t j = 0; j < dims; ++j) {
        if (used.subsets[j].empty()) return true;
    }
    std::vector<std::size_t> pos(dims, 0);
    while (true) {
        std::uint64_t tail_index = 0;
        std::uint64_t stride = 1;
        for (std::size_t j = 0; j < dims; ++j) {
            tail_index += used.subsets[j][pos[j]] * stride;
            stride *= shape.sizes[cut - shape.start + j];
        }
        for (auto h : heads) {
            if (!d.bits().test(h + head_card * tail_index)) return false;
        }
        std::size_t j = 0;
        while (j < dims && ++pos[j] == used.subsets[j].size()) pos[j++] = 0;
        if (j == dims) return true;
    }
}

inline bool contains_product(const PointSet& d, const SubgridWitness& w, const PointSet& gamma) {
    return contains_product(d, w, &gamma);
}

/// Little-endian bytes: bit i of the set is bit (i % 8) of byte i / 8.
inline std::vector<std::uint8_t> to_bytes(const PointSet& d) {
    std::vector<std::uint8_t> out((d.cardinality() + 7) / 8, 0);
    d.bits().for_each_set([&](std::uint64_t i) { out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8)); });
    return out;
}

inline PointSet from_bytes(GridShape shape, std::span<const std::uint8_t> bytes, const Limits& limits = {}) {
    const auto card = shape.cardinality();
    if (bytes.size() != (card + 7) / 8) throw DomainError("bitset byte length does not match the shape");
    BitVector bits(card);
    for (std::uint64_t i = 0; i < card; ++i) {
        if ((bytes[i / 8] >> (i % 8)) & 1u) bits.set(i);
    }
    for (std::uint64_t i = card; i < bytes.size() * 8; ++i) {
        if ((bytes[i / 8] >> (i % 8)) & 1u) throw DomainError("bitset padding bits must be zero");
    }
    return PointSet(std::move(shape), std::move(bits), limits);
}

}  // namespace prodense
