#include "softfacet/special_functions.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

namespace softfacet {
namespace {

using Precise = boost::multiprecision::cpp_bin_float_50;

double reference_normal_cdf(double x)
{
    Precise px(x);
    return static_cast<double>(boost::math::erfc(-px / boost::multiprecision::sqrt(Precise(2))) / 2);
}

double reference_t_cdf(double x, double dof)
{
    boost::math::students_t_distribution<Precise> dist{Precise(dof)};
    return static_cast<double>(boost::math::cdf(dist, Precise(x)));
}

// Composite Simpson integration of the t density over [0, x].
double simpson_t_cdf(double x, double dof)
{
    const double c = std::exp(std::lgamma(0.5 * (dof + 1)) - std::lgamma(0.5 * dof)) / std::sqrt(dof * M_PI);
    auto density = [&](double t) { return c * std::pow(1.0 + t * t / dof, -0.5 * (dof + 1)); };
    const int n = 20000;
    const double h = x / n;
    double sum = density(0.0) + density(x);
    for (int i = 1; i < n; ++i) {
        sum += density(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return 0.5 + sum * h / 3.0;
}

TEST(StdNormalCdf, KnownValues)
{
    EXPECT_DOUBLE_EQ(std_normal_cdf(0.0), 0.5);
    EXPECT_NEAR(std_normal_cdf(1.959964), 0.975, 1e-6);
    EXPECT_EQ(std_normal_cdf(-std::numeric_limits<double>::infinity()), 0.0);
    EXPECT_EQ(std_normal_cdf(std::numeric_limits<double>::infinity()), 1.0);
}

TEST(StdNormalCdf, SymmetricPairsSumToOne)
{
    for (double x : {0.1, 0.7, 1.5, 3.0, 6.0, 12.0}) {
        EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-15) << x;
    }
}

TEST(StdNormalCdf, MatchesHighPrecisionReference)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-12.0, 12.0);
    double previous_x = -13.0;
    double previous_p = 0.0;
    std::vector<double> xs(200);
    for (auto& x : xs) {
        x = dist(rng);
    }
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        const double p = std_normal_cdf(x);
        EXPECT_NEAR(p, reference_normal_cdf(x), 1e-10) << x;
        EXPECT_GE(p, previous_p) << previous_x << " -> " << x;
        previous_x = x;
        previous_p = p;
    }
}

TEST(StdNormalCdf, RejectsNaN)
{
    EXPECT_THROW((void)std_normal_cdf(std::nan("")), std::domain_error);
}

TEST(StudentTCdf, KnownValues)
{
    for (double dof : {0.5, 1.0, 4.0, 30.0, 1000.0}) {
        EXPECT_DOUBLE_EQ(student_t_cdf(0.0, dof), 0.5);
    }
    // Cauchy: 1/2 + atan(x)/pi
    EXPECT_NEAR(student_t_cdf(1.0, 1.0), 0.75, 1e-12);
    EXPECT_NEAR(student_t_cdf(2.0, 4.0), 0.941942, 1e-5);
}

TEST(StudentTCdf, MatchesIndependentOracles)
{
    EXPECT_NEAR(student_t_cdf(2.0, 4.0), simpson_t_cdf(2.0, 4.0), 1e-9);
    EXPECT_NEAR(student_t_cdf(0.8, 7.5), simpson_t_cdf(0.8, 7.5), 1e-9);
    EXPECT_NEAR(student_t_cdf(-3.0, 1.0), 0.5 + std::atan(-3.0) / M_PI, 1e-12);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x_dist(-30.0, 30.0);
    std::uniform_real_distribution<double> log_dof(std::log(0.3), std::log(2000.0));
    for (int i = 0; i < 100; ++i) {
        const double x = x_dist(rng);
        const double dof = std::exp(log_dof(rng));
        EXPECT_NEAR(student_t_cdf(x, dof), reference_t_cdf(x, dof), 1e-8) << x << " dof " << dof;
    }
}

TEST(StudentTCdf, ApproachesNormalForLargeDof)
{
    EXPECT_NEAR(student_t_cdf(1.3, 1e6), std_normal_cdf(1.3), 1e-6);
}

TEST(StudentTCdf, RejectsBadDof)
{
    EXPECT_THROW((void)student_t_cdf(1.0, 0.0), std::domain_error);
    EXPECT_THROW((void)student_t_cdf(1.0, -2.0), std::domain_error);
    EXPECT_THROW((void)student_t_cdf(std::nan(""), 2.0), std::domain_error);
}

TEST(RegularizedIncompleteBeta, Boundaries)
{
    EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0, 1.0), 0.0);
    EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0, 0.0), 1.0);
    // I_x(1, 1) = x
    EXPECT_NEAR(regularized_incomplete_beta(1.0, 1.0, 0.3, 0.7), 0.3, 1e-14);
    EXPECT_THROW((void)regularized_incomplete_beta(0.0, 1.0, 0.5, 0.5), std::domain_error);
}

}  // namespace
}  // namespace softfacet
