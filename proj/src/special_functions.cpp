#include "softfacet/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace softfacet {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEpsilon = 1e-16;
constexpr int kMaxIterations = 100000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) {
            return h;
        }
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b)
{
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double std_normal_cdf(double x)
{
    if (std::isnan(x)) {
        throw std::domain_error("std_normal_cdf: NaN argument");
    }
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double regularized_incomplete_beta(double a, double b, double x, double complement_x)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("regularized_incomplete_beta: shape parameters must be positive");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("regularized_incomplete_beta: x outside [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (complement_x == 0.0) {
        return 1.0;
    }
    const double log_front = a * std::log(x) + b * std::log(complement_x) - log_beta(a, b);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, complement_x) / b;
}

double student_t_cdf(double x, double dof)
{
    if (std::isnan(x) || std::isnan(dof)) {
        throw std::domain_error("student_t_cdf: NaN argument");
    }
    if (!(dof > 0.0)) {
        throw std::domain_error("student_t_cdf: degrees of freedom must be positive");
    }
    if (x == 0.0) {
        return 0.5;
    }
    const double x_sq = x * x;
    if (std::isinf(x_sq)) {
        return x > 0.0 ? 1.0 : 0.0;
    }
    const double denom = dof + x_sq;
    // P(|T| > |x|) = I_{dof/(dof+x^2)}(dof/2, 1/2)
    const double two_sided_tail = regularized_incomplete_beta(0.5 * dof, 0.5, dof / denom, x_sq / denom);
    const double tail = 0.5 * two_sided_tail;
    return x > 0.0 ? 1.0 - tail : tail;
}

}  // namespace softfacet
