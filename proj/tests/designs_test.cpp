#include <gtest/gtest.h>

#include <set>

#include "strag/designs.hpp"

namespace strag {
namespace {

TEST(CyclicAssignment, MatchesShiftPattern) {
    CyclicLayout layout = cyclic_assignment(5, 5, 3);
    EXPECT_EQ(layout.assignment[0], (std::vector<long>{0, 1, 2}));
    EXPECT_EQ(layout.assignment[3], (std::vector<long>{3, 4, 0}));
}

TEST(CyclicAssignment, SingleSymbolPerWorker) {
    CyclicLayout layout = cyclic_assignment(4, 4, 1);
    for (long j = 0; j < 4; ++j) EXPECT_EQ(layout.assignment[j], std::vector<long>{j});
}

TEST(CyclicAssignment, EachSymbolOncePerPosition) {
    CyclicLayout layout = cyclic_assignment(6, 6, 4);
    for (long sym = 0; sym < 6; ++sym) {
        std::set<long> positions;
        for (long j = 0; j < 6; ++j)
            for (long t = 0; t < 4; ++t)
                if (layout.assignment[j][t] == sym) positions.insert(t);
        EXPECT_EQ(positions, (std::set<long>{0, 1, 2, 3}));
    }
}

TEST(CyclicAssignment, RejectsEllAboveDelta) {
    EXPECT_THROW(cyclic_assignment(4, 4, 5), parameter_error);
}

// Independent check of alpha_c: enumerate every prefix state of the cyclic
// layout and take the max total with the fixed symbol processed exactly c
// times.
long long alpha_c_by_enumeration(long delta, long ell, long symbol, std::vector<long long>& out) {
    CyclicLayout layout = cyclic_assignment(delta, delta, ell);
    std::vector<long> pos(delta, -1);
    for (long j = 0; j < delta; ++j)
        for (long t = 0; t < ell; ++t)
            if (layout.assignment[j][t] == symbol) pos[j] = t;
    out.assign(ell + 1, -1);
    std::vector<long> w(delta, 0);
    for (;;) {
        long long total = 0;
        long copies = 0;
        for (long j = 0; j < delta; ++j) {
            total += w[j];
            if (pos[j] >= 0 && w[j] > pos[j]) ++copies;
        }
        if (copies <= ell) out[copies] = std::max(out[copies], total);
        long i = 0;
        while (i < delta && w[i] == ell) w[i++] = 0;
        if (i == delta) break;
        ++w[i];
    }
    return 0;
}

TEST(AlphaC, ClosedFormValues) {
    EXPECT_EQ(alpha_c(5, 3, 0), 9);
    EXPECT_EQ(alpha_c(12, 3, 1), 33);
    for (long delta = 2; delta <= 9; ++delta)
        for (long ell = 1; ell <= delta; ++ell) EXPECT_EQ(alpha_c(delta, ell, ell), delta * ell);
    EXPECT_THROW(alpha_c(5, 3, 4), parameter_error);
}

TEST(AlphaC, MatchesExhaustivePrefixSearch) {
    for (long delta = 2; delta <= 6; ++delta) {
        for (long ell = 1; ell <= delta; ++ell) {
            std::vector<long long> by_count;
            alpha_c_by_enumeration(delta, ell, 0, by_count);
            for (long c = 0; c <= ell; ++c)
                EXPECT_EQ(alpha_c(delta, ell, c), by_count[c])
                    << "delta=" << delta << " ell=" << ell << " c=" << c;
            // Lemma also says the value does not depend on the chosen symbol.
            std::vector<long long> other;
            alpha_c_by_enumeration(delta, ell, delta / 2, other);
            EXPECT_EQ(by_count, other);
        }
    }
}

TEST(AlphaC, MatchesExhaustiveAtDelta8) {
    std::vector<long long> by_count;
    alpha_c_by_enumeration(8, 3, 0, by_count);
    for (long c = 0; c <= 3; ++c) EXPECT_EQ(alpha_c(8, 3, c), by_count[c]);
    alpha_c_by_enumeration(8, 8, 0, by_count);
    for (long c = 0; c <= 8; ++c) EXPECT_EQ(alpha_c(8, 8, c), by_count[c]);
}

TEST(TrivialClasses, ConsecutiveBlocks) {
    DesignSet ds = trivial_classes(12, 3, 1);
    ASSERT_EQ(ds.classes.size(), 1u);
    EXPECT_EQ(ds.classes[0].blocks,
              (std::vector<Block>{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {9, 10, 11}}));
}

TEST(TrivialClasses, SingletonsAndCopies) {
    DesignSet singles = trivial_classes(4, 1, 1);
    EXPECT_EQ(singles.classes[0].blocks, (std::vector<Block>{{0}, {1}, {2}, {3}}));
    DesignSet copies = trivial_classes(6, 2, 3);
    ASSERT_EQ(copies.classes.size(), 3u);
    for (const auto& c : copies.classes) {
        EXPECT_TRUE(c == copies.classes[0]);
        c.validate();
    }
    EXPECT_THROW(trivial_classes(7, 2, 1), parameter_error);
}

TEST(ShiftedPairClasses, MatchesShiftFormulaAtDelta8) {
    DesignSet ds = shifted_pair_classes(8);
    EXPECT_EQ(ds.classes[0].blocks, (std::vector<Block>{{0, 1}, {2, 3}, {4, 5}, {6, 7}}));
    // i-th block {2i, 2i+5} mod 8, kept in shift order: {0,5},{2,7},{4,1},{6,3}.
    EXPECT_EQ(ds.classes[1].blocks, (std::vector<Block>{{0, 5}, {2, 7}, {1, 4}, {3, 6}}));
}

TEST(ShiftedPairClasses, CrossIntersectionsStayAtMostOne) {
    for (long delta = 8; delta <= 20; delta += 2) {
        DesignSet ds = shifted_pair_classes(delta);
        for (const auto& c : ds.classes) c.validate();
        EXPECT_LE(max_cross_class_intersection(ds), 1) << "delta=" << delta;
    }
}

TEST(ShiftedPairClasses, RejectsOddOrSmallDelta) {
    EXPECT_THROW(shifted_pair_classes(9), parameter_error);
    EXPECT_THROW(shifted_pair_classes(6), parameter_error);
}

TEST(KirkmanClasses, SevenClassesOfFiveTriples) {
    DesignSet ds = kirkman_classes();
    EXPECT_EQ(ds.num_points, 15);
    ASSERT_EQ(ds.classes.size(), 7u);
    for (const auto& c : ds.classes) {
        EXPECT_EQ(c.blocks.size(), 5u);
        c.validate();  // each class partitions the 15 points
    }
}

TEST(KirkmanClasses, EveryPairInExactlyOneBlock) {
    DesignSet ds = kirkman_classes();
    std::map<std::pair<long, long>, long> pair_count;
    for (const auto& c : ds.classes)
        for (const auto& b : c.blocks)
            for (size_t i = 0; i < b.size(); ++i)
                for (size_t j = i + 1; j < b.size(); ++j) ++pair_count[{b[i], b[j]}];
    EXPECT_EQ(pair_count.size(), 105u);
    for (const auto& [pair, count] : pair_count) EXPECT_EQ(count, 1);
    EXPECT_LE(max_cross_class_intersection(ds), 1);
}

TEST(IncidenceMatrix, MatchesPairDesignByHand) {
    // Points {0,1,2,3}, all six pairs in lexicographic order.
    std::vector<Block> blocks = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    IncidenceMatrix m = incidence_matrix(4, blocks);
    const std::uint8_t want[4][6] = {
        {1, 1, 1, 0, 0, 0}, {1, 0, 0, 1, 1, 0}, {0, 1, 0, 1, 0, 1}, {0, 0, 1, 0, 1, 1}};
    for (long p = 0; p < 4; ++p)
        for (long b = 0; b < 6; ++b) EXPECT_EQ(m.at(p, b), want[p][b]);
}

TEST(IncidenceMatrix, SingletonsGiveIdentity) {
    IncidenceMatrix m = incidence_matrix(trivial_classes(5, 1, 1).classes[0]);
    for (long p = 0; p < 5; ++p)
        for (long b = 0; b < 5; ++b) EXPECT_EQ(m.at(p, b), p == b ? 1 : 0);
    for (long s : m.row_sums()) EXPECT_EQ(s, 1);
}

TEST(IncidenceMatrix, KirkmanColumnSumsAreThree) {
    IncidenceMatrix m = incidence_matrix(kirkman_classes());
    EXPECT_EQ(m.points, 15);
    EXPECT_EQ(m.num_blocks, 35);
    for (long s : m.column_sums()) EXPECT_EQ(s, 3);
}

TEST(ProductClass, SingletonsStaySingletons) {
    ParallelClass a = trivial_classes(3, 1, 1).classes[0];
    ParallelClass b = trivial_classes(4, 1, 1).classes[0];
    ParallelClass p = product_class(a, b);
    EXPECT_EQ(p.num_points, 12);
    EXPECT_EQ(p.blocks.size(), 12u);
    for (long i = 0; i < 12; ++i) EXPECT_EQ(p.blocks[i], Block{i});
}

TEST(ProductClass, PairClassesGiveFourPointBlocks) {
    ParallelClass cls(6, {{0, 1}, {2, 3}, {4, 5}});
    ParallelClass p = product_class(cls, cls);
    EXPECT_EQ(p.num_points, 36);
    EXPECT_EQ(p.blocks.size(), 9u);
    for (const auto& b : p.blocks) EXPECT_EQ(b.size(), 4u);
    p.validate();  // disjoint cover of all 36 points
    EXPECT_EQ(p.blocks[0], (Block{0, 1, 6, 7}));
}

TEST(ProductClass, IncidenceIsColumnwiseKronecker) {
    ParallelClass a(4, {{0, 1}, {2, 3}});
    ParallelClass b(6, {{0, 3}, {1, 4}, {2, 5}});
    IncidenceMatrix ia = incidence_matrix(a);
    IncidenceMatrix ib = incidence_matrix(b);
    IncidenceMatrix ip = incidence_matrix(product_class(a, b));
    ASSERT_EQ(ip.points, 24);
    ASSERT_EQ(ip.num_blocks, 6);
    for (long ca = 0; ca < ia.num_blocks; ++ca)
        for (long cb = 0; cb < ib.num_blocks; ++cb)
            for (long pa = 0; pa < 4; ++pa)
                for (long pb = 0; pb < 6; ++pb)
                    EXPECT_EQ(ip.at(pa * 6 + pb, ca * ib.num_blocks + cb),
                              ia.at(pa, ca) * ib.at(pb, cb));
}

TEST(DesignSetJson, RoundTrips) {
    DesignSet ds = shifted_pair_classes(10);
    DesignSet back = design_set_from_json(design_set_to_json(ds));
    EXPECT_TRUE(ds == back);
    EXPECT_EQ(design_set_to_json(ds)["points"], 10);
}

}  // namespace
}  // namespace strag
