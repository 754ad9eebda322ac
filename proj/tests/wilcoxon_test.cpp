#include "softfacet/wilcoxon.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace softfacet {
namespace {

// P(W- <= statistic) by enumerating all 2^n sign assignments.
double brute_force_lower_p(const std::vector<double>& ranks, double statistic)
{
    const std::size_t n = ranks.size();
    std::size_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1U) {
                w += ranks[i];
            }
        }
        if (w <= statistic + 1e-9) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
}

double brute_force_point_mass(const std::vector<double>& ranks, double statistic)
{
    const std::size_t n = ranks.size();
    std::size_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1U) {
                w += ranks[i];
            }
        }
        if (std::abs(w - statistic) < 1e-9) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
}

std::vector<double> random_differences(std::mt19937_64& rng, std::size_t n, int spread)
{
    std::vector<double> d(n);
    for (auto& x : d) {
        x = static_cast<double>(static_cast<int>(rng() % (2 * spread + 1)) - spread + 2);
    }
    return d;
}

TEST(SignedRanks, MidranksAndZeroDropping)
{
    const std::vector<double> d{0, 3, -1, 3, -3, 0, 2};
    const auto r = signed_ranks(d);
    EXPECT_EQ(r.ranks, (std::vector<double>{4, 1, 4, 4, 2}));
    EXPECT_EQ(r.positive, (std::vector<bool>{true, false, true, false, true}));
    EXPECT_EQ(r.tie_groups, (std::vector<std::size_t>{3}));
}

TEST(Wilcoxon, AllHardWorseFivePairs)
{
    const std::vector<std::pair<double, double>> pairs{{1, 4}, {2, 7}, {3, 4}, {1, 9}, {5, 7}};
    const auto r = wilcoxon_signed_rank(pairs);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.n_nonzero, 5u);
    EXPECT_TRUE(r.exact);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 32.0);
}

TEST(Wilcoxon, AntisymmetricDifferences)
{
    const std::vector<double> d{1, -1, 2, -2, 5, -5, 7, -7};
    const auto r = wilcoxon_signed_rank_differences(d);
    const auto ranks = signed_ranks(d).ranks;
    double total = 0.0;
    for (double x : ranks) {
        total += x;
    }
    EXPECT_DOUBLE_EQ(r.statistic, total / 2);
    EXPECT_NEAR(r.p_value, 0.5 + 0.5 * brute_force_point_mass(ranks, r.statistic), 1e-12);
}

TEST(Wilcoxon, AllZeroIsDegenerate)
{
    const std::vector<double> d{0, 0, 0};
    EXPECT_THROW((void)wilcoxon_signed_rank_differences(d), DegenerateDataError);
    EXPECT_THROW((void)wilcoxon_signed_rank_differences(std::vector<double>{}), DegenerateDataError);
}

TEST(Wilcoxon, ExactMatchesEnumerationWithTies)
{
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 300; ++trial) {
        const auto d = random_differences(rng, 1 + rng() % 14, 1 + static_cast<int>(rng() % 6));
        const auto ranks = signed_ranks(d);
        if (ranks.ranks.empty()) {
            continue;
        }
        const auto r = wilcoxon_signed_rank_differences(d);
        EXPECT_TRUE(r.exact);
        EXPECT_NEAR(r.p_value, brute_force_lower_p(ranks.ranks, r.statistic), 1e-12);
        EXPECT_GT(r.p_value, 0.0);
        EXPECT_LE(r.p_value, 1.0);
    }
}

TEST(Wilcoxon, NormalApproximationCloseToExact)
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 20 + rng() % 6;
        const auto d = random_differences(rng, n, 30);
        const auto ranks = signed_ranks(d);
        if (ranks.ranks.size() < 20) {
            continue;
        }
        const auto r = wilcoxon_signed_rank_differences(d);
        const double approx = wilcoxon_normal_lower_p(ranks.ranks.size(), ranks.tie_groups, r.statistic);
        EXPECT_NEAR(approx, r.p_value, 0.02);
    }
}

TEST(Wilcoxon, LargeSampleUsesApproximation)
{
    std::mt19937_64 rng(103);
    const auto d = random_differences(rng, 40, 10);
    const auto r = wilcoxon_signed_rank_differences(d);
    EXPECT_FALSE(r.exact);
    const auto ranks = signed_ranks(d);
    EXPECT_DOUBLE_EQ(r.p_value, wilcoxon_normal_lower_p(ranks.ranks.size(), ranks.tie_groups, r.statistic));
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
}

TEST(Wilcoxon, ExactPValueIsMonotoneInStatistic)
{
    const std::vector<double> ranks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double previous = 0.0;
    for (double w = 0; w <= 55; w += 1) {
        const double p = wilcoxon_exact_lower_p(ranks, w);
        EXPECT_GE(p, previous);
        previous = p;
    }
    EXPECT_DOUBLE_EQ(previous, 1.0);
}

}  // namespace
}  // namespace softfacet
