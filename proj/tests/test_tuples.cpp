#include <random>

#include <gtest/gtest.h>

#include "sftorient/tuples.hpp"

using namespace sftorient;

TEST(IndPm, Arithmetic) {
    const CRTupleShape t{{1, 1, 0}, {}, 0, 0, 3};
    EXPECT_EQ(ind_pm(t, Side::positive), 0);
    EXPECT_EQ(ind_pm(t, Side::negative), 0);
    EXPECT_EQ(ind(trivial_tuple(1, 3)), 0);
}

TEST(FredholmIndex, Examples) {
    for (int n = 2; n <= 6; ++n) {
        for (long mu = -4; mu <= 4; ++mu) {
            EXPECT_EQ(fredholm_index(trivial_tuple(mod2(mu + n - 1), n), {mu}, {mu}), 2);
        }
    }
    EXPECT_EQ(fredholm_index({{}, {}, 0, 5, 3}, {}, {}), 2 * 5 + 2 * 3);
    EXPECT_EQ(fredholm_index({{0, 0}, {}, 1, 0, 2}, {3, 1}, {}), 2);
}

TEST(FredholmIndex, LengthMismatchThrows) {
    EXPECT_THROW(fredholm_index(trivial_tuple(0, 2), {1, 2}, {1}), std::invalid_argument);
    EXPECT_THROW(virtual_dimension(trivial_tuple(0, 2), {1}, {}), std::invalid_argument);
}

TEST(VirtualDimension, Examples) {
    for (int n = 2; n <= 5; ++n) {
        EXPECT_EQ(virtual_dimension(trivial_tuple(0, n), {7}, {7}), 0);
    }
    EXPECT_EQ(virtual_dimension({{0, 0, 0}, {0}, 2, 4, 3}, {5, 1, 2}, {3}), 5 + 1 + 2 - 3 + 8);
}

TEST(ValidateRigid, Examples) {
    EXPECT_TRUE(validate_rigid({{1}, {1, 1}, 0, 0, 3}));
    EXPECT_FALSE(validate_rigid({{0}, {0}, 0, 0, 3}));
    EXPECT_TRUE(validate_rigid({{1, 0, 0}, {}, 0, 0, 3}));
}

TEST(GradingFromMu, ParityShift) {
    EXPECT_EQ(grading_from_mu(1, 2), 0);
    EXPECT_EQ(grading_from_mu(1, 3), 1);
    EXPECT_EQ(grading_from_mu(-1, 2), 0);
}

TEST(IndexParity, MatchesGradings) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> small(0, 3);
    std::uniform_int_distribution<long> mu(-6, 6);
    for (int it = 0; it < 100; ++it) {
        CRTupleShape t;
        t.n = 2 + small(rng);
        t.genus = small(rng);
        t.c1 = small(rng) - 1;
        std::vector<long> mp(static_cast<std::size_t>(small(rng)));
        std::vector<long> mm(static_cast<std::size_t>(small(rng)));
        for (auto& m : mp) {
            m = mu(rng);
            t.pos.push_back(grading_from_mu(m, t.n));
        }
        for (auto& m : mm) {
            m = mu(rng);
            t.neg.push_back(grading_from_mu(m, t.n));
        }
        EXPECT_EQ(mod2(fredholm_index(t, mp, mm)), ind(t));
        EXPECT_EQ(mod2(virtual_dimension(t, mp, mm)), ind(t));
    }
}
