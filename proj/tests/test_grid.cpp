#include <gtest/gtest.h>

#include "support.hpp"

using namespace prodense;
using prodense::fixtures::Rng;
using prodense::fixtures::uniform;

TEST(GridShape, Basics) {
    const GridShape s(2, {3, 4, 5});
    EXPECT_EQ(s.end(), 5u);
    EXPECT_EQ(s.cardinality(), 60u);
    EXPECT_EQ(s.size_at(3), 4u);
    EXPECT_EQ(s.prefix(4), GridShape(2, {3, 4}));
    EXPECT_EQ(s.suffix(4), GridShape(4, {5}));
    EXPECT_EQ(s.prefix(2).cardinality(), 1u);
    EXPECT_THROW(GridShape(0, {3, 0}), DomainError);
    EXPECT_THROW(s.slice(1, 3), DomainError);
    EXPECT_THROW(GridShape(0, {1u << 31, 1u << 31, 8}).cardinality(), BudgetExceeded);
}

TEST(Index, Examples) {
    const GridShape s(0, {3, 4});
    EXPECT_EQ(index_of(s, Point{0, {2, 1}}), 5u);
    EXPECT_EQ(point_of(s, 11), (Point{0, {2, 3}}));
    EXPECT_THROW(index_of(s, Point{0, {3, 0}}), DomainError);
    EXPECT_THROW(index_of(s, Point{1, {0, 0}}), DomainError);
    EXPECT_THROW(point_of(s, 12), DomainError);
}

TEST(Density, Examples) {
    EXPECT_EQ(density(PointSet::full(GridShape(0, {4, 4}))), 1);
    EXPECT_EQ(density(PointSet::empty(GridShape(0, {4, 4}))), 0);
    const std::vector<std::uint64_t> five{0, 3, 5, 7, 11};
    EXPECT_EQ(density(PointSet::from_indices(GridShape(0, {3, 4}), five)), make_rational(5, 12));
}

TEST(Fiber, Examples) {
    const GridShape s(0, {2, 2});
    EXPECT_EQ(fiber(PointSet::full(s), Point{0, {1}}), PointSet::full(GridShape(1, {2})));
    const std::vector<Point> pts{{0, {0, 0}}, {0, {0, 1}}, {0, {1, 0}}};
    const auto d = PointSet::from_points(s, pts);
    EXPECT_EQ(fiber(d, Point{0, {0}}), PointSet::full(GridShape(1, {2})));
    const std::vector<std::uint64_t> zero{0};
    EXPECT_EQ(fiber(d, Point{0, {1}}), PointSet::from_indices(GridShape(1, {2}), zero));
    // A fiber over every coordinate is a set over the empty product.
    EXPECT_EQ(fiber(d, Point{0, {1, 0}}).count(), 1u);
    EXPECT_EQ(fiber(d, Point{0, {1, 1}}).count(), 0u);
    EXPECT_THROW(fiber(d, Point{1, {0}}), DomainError);
}

TEST(ConcatSets, Examples) {
    const std::vector<std::uint64_t> zero{0};
    const auto a = PointSet::from_indices(GridShape(0, {2}), zero);
    const auto b = PointSet::full(GridShape(1, {3}));
    const auto c = concat_sets(a, b);
    EXPECT_EQ(c.count(), 3u);
    EXPECT_EQ(c.shape(), GridShape(0, {2, 3}));
    EXPECT_TRUE(c.contains(Point{0, {0, 2}}));
    EXPECT_EQ(concat_sets(PointSet::empty(GridShape(0, {2})), b).count(), 0u);
    EXPECT_THROW(concat_sets(b, a), DomainError);
}

TEST(Restrict, Examples) {
    EXPECT_EQ(restrict(Point{0, {1, 2, 0}}, 2), (Point{0, {1, 2}}));
    EXPECT_THROW(restrict(Point{0, {1, 2, 0}}, 0), DomainError);
    EXPECT_EQ(concat_points(Point{0, {1}}, Point{1, {2, 0}}), (Point{0, {1, 2, 0}}));
}

TEST(ContainsProduct, Examples) {
    const GridShape s(0, {3, 3});
    EXPECT_TRUE(contains_product(PointSet::full(s), SubgridWitness{0, {{0, 2}, {1}}}));
    const auto off = fixtures::off_diagonal(3);
    EXPECT_FALSE(contains_product(off, SubgridWitness{0, {{0, 1}, {0, 1}}}));
    EXPECT_TRUE(contains_product(off, SubgridWitness{0, {{0, 1}, {2}}}));
    // Planted product.
    Rng rng(3);
    auto bits = fixtures::random_bits(rng, 9, 300);
    for (auto i : {0u, 2u}) {
        for (auto j : {1u, 2u}) bits.set(i + 3 * j);
    }
    EXPECT_TRUE(contains_product(PointSet(s, bits), SubgridWitness{0, {{0, 2}, {1, 2}}}));
    // Witness shape errors.
    EXPECT_THROW(contains_product(off, SubgridWitness{0, {{0, 1}}}), DomainError);
    EXPECT_THROW(contains_product(off, SubgridWitness{0, {{1, 0}, {2}}}), DomainError);
    EXPECT_THROW(contains_product(off, SubgridWitness{0, {{0, 3}, {2}}}), DomainError);
    EXPECT_THROW(contains_product(off, SubgridWitness{1, {{0}}}), DomainError);
}

TEST(ContainsProduct, WithGamma) {
    const GridShape s(0, {2, 3});
    // D = {(0,1), (1,1), (0,2)}
    const std::vector<std::uint64_t> members{2, 3, 4};
    const auto d = PointSet::from_indices(s, members);
    const auto both = PointSet::full(GridShape(0, {2}));
    const std::vector<std::uint64_t> zero{0};
    const auto only_zero = PointSet::from_indices(GridShape(0, {2}), zero);
    EXPECT_TRUE(contains_product(d, SubgridWitness{1, {{1}}}, both));
    EXPECT_FALSE(contains_product(d, SubgridWitness{1, {{1, 2}}}, both));
    EXPECT_TRUE(contains_product(d, SubgridWitness{1, {{1, 2}}}, only_zero));
    // Longer witnesses are truncated to the set's coordinates.
    EXPECT_TRUE(contains_product(d, SubgridWitness{1, {{1}, {0, 1}}}, both));
}

TEST(Bytes, RoundtripAndPadding) {
    const GridShape s(0, {3, 3});
    const std::vector<std::uint64_t> members{0, 8};
    const auto d = PointSet::from_indices(s, members);
    const auto bytes = to_bytes(d);
    EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0x01, 0x01}));
    EXPECT_EQ(from_bytes(s, bytes), d);
    const std::vector<std::uint8_t> padded{0x01, 0x03};
    EXPECT_THROW(from_bytes(s, padded), DomainError);
    const std::vector<std::uint8_t> short_bytes{0x01};
    EXPECT_THROW(from_bytes(s, short_bytes), DomainError);
}

TEST(PointSet, Budget) {
    Limits tiny;
    tiny.max_cells = 10;
    EXPECT_THROW(PointSet::full(GridShape(0, {4, 4}), tiny), BudgetExceeded);
    EXPECT_NO_THROW(PointSet::full(GridShape(0, {2, 5}), tiny));
    const std::vector<std::uint64_t> bad{16};
    EXPECT_THROW(PointSet::from_indices(GridShape(0, {4, 4}), bad), DomainError);
}

// --- properties ---------------------------------------------------------------

TEST(GridProperty, IndexPointBijection) {
    Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const auto shape = fixtures::random_shape(rng, uniform(rng, 0, 3), 4, 9);
        if (shape.cardinality() > 10000) continue;
        for (std::uint64_t i = 0; i < shape.cardinality(); ++i) {
            const auto p = point_of(shape, i);
            ASSERT_EQ(index_of(shape, p), i);
        }
    }
}

TEST(GridProperty, DensityMonotoneUnderInclusion) {
    Rng rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const auto shape = fixtures::random_shape(rng, 0, 3, 6);
        const auto a = fixtures::random_set(rng, shape, uniform(rng, 0, 1000));
        const auto b = fixtures::random_set(rng, shape, uniform(rng, 0, 1000));
        const auto both = intersection(a, b);
        EXPECT_TRUE(both.bits().subset_of(a.bits()));
        EXPECT_LE(density(both), density(a));
        EXPECT_LE(density(both), density(b));
        EXPECT_GE(density(a), 0);
        EXPECT_LE(density(a), 1);
    }
}

TEST(GridProperty, FubiniCountingIdentity) {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto shape = fixtures::random_shape(rng, uniform(rng, 0, 2), 4, 7);
        if (shape.cardinality() > 10000) continue;
        const auto d = fixtures::random_set(rng, shape, uniform(rng, 0, 1000));
        for (std::size_t cut = shape.start; cut <= shape.end(); ++cut) {
            const auto head = shape.prefix(cut);
            std::uint64_t total = 0;
            for (std::uint64_t i = 0; i < head.cardinality(); ++i) total += fiber(d, point_of(head, i)).count();
            ASSERT_EQ(total, d.count());
        }
        const auto fibers = first_coordinate_fibers(d);
        for (std::uint64_t x = 0; x < fibers.size(); ++x) {
            EXPECT_EQ(fibers[x], fiber(d, Point{shape.start, {x}}));
        }
    }
}

TEST(GridProperty, ConcatCardinalityAndMembership) {
    Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        const auto shape = fixtures::random_shape(rng, 0, 4, 5);
        const std::size_t cut = uniform(rng, shape.start, shape.end());
        const auto a = fixtures::random_set(rng, shape.prefix(cut), uniform(rng, 0, 1000));
        const auto b = fixtures::random_set(rng, shape.suffix(cut), uniform(rng, 0, 1000));
        const auto c = concat_sets(a, b);
        ASSERT_EQ(c.count(), a.count() * b.count());
        for (const auto& p : fixtures::points(c)) {
            if (cut > shape.start) {
                EXPECT_TRUE(a.contains(restrict(p, cut)));
            }
        }
    }
}

TEST(GridProperty, ContainsProductMatchesEnumeration) {
    Rng rng(25);
    for (int trial = 0; trial < 300; ++trial) {
        const auto shape = fixtures::random_shape(rng, 0, 3, 4);
        const std::size_t cut = uniform(rng, shape.start, shape.end() - 1);
        const auto d = fixtures::random_set(rng, shape, uniform(rng, 500, 1000));
        const auto gamma = fixtures::random_set(rng, shape.prefix(cut), uniform(rng, 0, 1000));
        SubgridWitness w{cut, {}};
        for (std::size_t q = cut; q < shape.end(); ++q) {
            std::vector<std::uint64_t> subset;
            for (std::uint64_t x = 0; x < shape.size_at(q); ++x) {
                if (uniform(rng, 0, 1)) subset.push_back(x);
            }
            w.subsets.push_back(subset);
        }
        EXPECT_EQ(contains_product(d, w, gamma), fixtures::product_inside(d, w, &gamma));
    }
}

TEST(GridProperty, EqualityAndSerialization) {
    Rng rng(26);
    for (int trial = 0; trial < 100; ++trial) {
        const auto shape = fixtures::random_shape(rng, uniform(rng, 0, 3), 3, 9);
        const auto d = fixtures::random_set(rng, shape, uniform(rng, 0, 1000));
        EXPECT_EQ(from_bytes(shape, to_bytes(d)), d);
        EXPECT_EQ(PointSet::from_indices(shape, d.indices()), d);
        if (d.count() > 0) {
            BitVector flipped = d.bits();
            flipped.reset(d.indices().front());
            EXPECT_FALSE(PointSet(shape, flipped) == d);
        }
    }
}
