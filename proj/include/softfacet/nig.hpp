#pragma once

#include <span>

#include "softfacet/facets.hpp"

namespace softfacet {

/// Normal-Inverse-Gamma hyper-parameters for a Gaussian price-selection model:
///   sigma^2 ~ IG(alpha, beta),  mu | sigma^2 ~ N(mu, sigma^2 / kappa).
struct NIGState {
    double mu = 0.0;
    double kappa = 1.0;
    double alpha = 1.0;
    double beta = 1.0;

    /// Throws std::invalid_argument unless every field is finite and
    /// kappa, alpha, beta are strictly positive.
    void validate() const;

    friend bool operator==(const NIGState&, const NIGState&) = default;
};

struct GaussianEstimate {
    double mean = 0.0;
    double variance = 1.0;
};

/// Location-scale Student-t: mean + scale * T_dof.
struct StudentTEstimate {
    double mean = 0.0;
    double scale_squared = 1.0;
    double dof = 1.0;
};

/// Prior centred on the item's list price.
[[nodiscard]] NIGState nig_prior_init(const Item& item, double kappa0, double alpha0, double beta0);

/// Representative price of a range selection. Open-ended ranges are closed
/// at `open_end_width` beyond the finite bound before taking the midpoint.
/// Throws std::invalid_argument for (-inf, +inf) or a non-positive width.
[[nodiscard]] double range_midpoint(const FacetFilter& filter, double open_end_width);

/// Conjugate update from the batch sample mean and unbiased sample variance.
/// Throws std::invalid_argument on a non-finite observation.
[[nodiscard]] NIGState nig_update(const NIGState& state, std::span<const double> midpoints);

/// Posterior mode: (mu, beta / (alpha + 3/2)).
[[nodiscard]] GaussianEstimate nig_map_estimate(const NIGState& state);

/// Posterior predictive of a single price selection.
[[nodiscard]] StudentTEstimate nig_predictive(const NIGState& state);

/// Phi((hi - mu)/sigma) - Phi((lo - mu)/sigma). Throws std::domain_error when sigma <= 0.
[[nodiscard]] double gaussian_range_likelihood(double mu, double sigma, const FacetFilter& filter);

/// Range probability under the MAP Gaussian; sigma is floored at `sigma_min`.
[[nodiscard]] double nig_map_range_likelihood(const NIGState& state,
                                              const FacetFilter& filter,
                                              double sigma_min = 1e-6);

/// Range probability under the Student-t posterior predictive.
[[nodiscard]] double nig_predictive_range_likelihood(const NIGState& state,
                                                     const FacetFilter& filter,
                                                     double sigma_min = 1e-6);

}  // namespace softfacet
