#include <gtest/gtest.h>

#include <vector>

#include "xplore/rng.hpp"

using namespace xplore;

// Reference values computed with an independent big-integer implementation.
TEST(Rng, SplitMixMatchesReference) {
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(derive_seed(5, 7), 0x88BF589A5CE00596ULL);
    EXPECT_EQ(fnv1a64("spawns"), 0x2CBC8BAC8E003C51ULL);
}

TEST(Rng, XorshiftStreamMatchesReference) {
    Rng r(1);
    EXPECT_EQ(r.next(), 0x4B46A55DF3611B9BULL);
    EXPECT_EQ(r.next(), 0xD7E1F1410E763EF4ULL);
    EXPECT_EQ(r.next(), 0x5F14EC66975F9B06ULL);
}

TEST(Rng, UniformStaysInUnitInterval) {
    Rng r(9);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, BelowIsUniform) {
    // Chi-squared over 7 bins; 16.812 is the upper 1% point for 6 degrees of freedom.
    Rng r(2024);
    std::vector<int> bins(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++bins[r.below(7)];
    double chi2 = 0.0;
    for (int c : bins) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    EXPECT_LT(chi2, 16.812);
    EXPECT_EQ(r.below(1), 0u);
    EXPECT_EQ(r.below(0), 0u);
}

TEST(Rng, SiblingSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(0, 1), derive_seed(1, 0));
    EXPECT_NE(Rng(0).state(), 0u);
}
