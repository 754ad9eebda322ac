#pragma once

namespace softfacet {

/// Standard Gaussian CDF. Accepts +/-inf; throws std::domain_error on NaN.
[[nodiscard]] double std_normal_cdf(double x);

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
///
/// `complement_x` must equal 1 - x; passing it separately keeps precision
/// when x is close to 1.
[[nodiscard]] double regularized_incomplete_beta(double a, double b, double x, double complement_x);

/// CDF of Student's t distribution with `dof` degrees of freedom.
/// Throws std::domain_error when dof <= 0 or either argument is NaN.
[[nodiscard]] double student_t_cdf(double x, double dof);

}  // namespace softfacet
