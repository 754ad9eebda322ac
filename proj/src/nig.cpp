#include "softfacet/nig.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "softfacet/special_functions.hpp"

namespace softfacet {

void NIGState::validate() const
{
    if (!std::isfinite(mu) || !std::isfinite(kappa) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("NIG hyper-parameters must be finite");
    }
    if (!(kappa > 0.0) || !(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("NIG kappa, alpha and beta must be positive");
    }
}

NIGState nig_prior_init(const Item& item, double kappa0, double alpha0, double beta0)
{
    NIGState state{item.price, kappa0, alpha0, beta0};
    state.validate();
    return state;
}

double range_midpoint(const FacetFilter& filter, double open_end_width)
{
    const auto& r = filter.as_range();
    if (!(open_end_width > 0.0)) {
        throw std::invalid_argument("open_end_width must be positive");
    }
    const bool lo_open = std::isinf(r.lo);
    const bool hi_open = std::isinf(r.hi);
    if (lo_open && hi_open) {
        throw std::invalid_argument("cannot take the midpoint of an unbounded range");
    }
    const double lo = lo_open ? r.hi - open_end_width : r.lo;
    const double hi = hi_open ? r.lo + open_end_width : r.hi;
    return 0.5 * (lo + hi);
}

NIGState nig_update(const NIGState& state, std::span<const double> midpoints)
{
    state.validate();
    if (midpoints.empty()) {
        return state;
    }
    const auto n = static_cast<double>(midpoints.size());
    double sum = 0.0;
    for (double m : midpoints) {
        if (!std::isfinite(m)) {
            throw std::invalid_argument("non-finite price observation");
        }
        sum += m;
    }
    const double mean = sum / n;
    double sum_sq_dev = 0.0;  // (n - 1) s^2
    for (double m : midpoints) {
        sum_sq_dev += (m - mean) * (m - mean);
    }
    const double shift = state.mu - mean;

    NIGState next;
    next.mu = (state.kappa * state.mu + n * mean) / (state.kappa + n);
    next.kappa = state.kappa + n;
    next.alpha = state.alpha + 0.5 * n;
    next.beta = state.beta + 0.5 * sum_sq_dev
        + state.kappa * n * shift * shift / (2.0 * state.kappa + 2.0 * n);
    return next;
}

GaussianEstimate nig_map_estimate(const NIGState& state)
{
    return {state.mu, state.beta / (state.alpha + 1.5)};
}

StudentTEstimate nig_predictive(const NIGState& state)
{
    return {state.mu,
            state.beta * (state.kappa + 1.0) / (state.alpha * state.kappa),
            2.0 * state.alpha};
}

double gaussian_range_likelihood(double mu, double sigma, const FacetFilter& filter)
{
    if (!(sigma > 0.0)) {
        throw std::domain_error("gaussian_range_likelihood: sigma must be positive");
    }
    const auto& r = filter.as_range();
    if (r.lo == r.hi) {
        return 0.0;
    }
    const double p = std_normal_cdf((r.hi - mu) / sigma) - std_normal_cdf((r.lo - mu) / sigma);
    return std::clamp(p, 0.0, 1.0);
}

double nig_map_range_likelihood(const NIGState& state, const FacetFilter& filter, double sigma_min)
{
    const auto estimate = nig_map_estimate(state);
    const double sigma = std::max(std::sqrt(estimate.variance), sigma_min);
    return gaussian_range_likelihood(estimate.mean, sigma, filter);
}

double nig_predictive_range_likelihood(const NIGState& state, const FacetFilter& filter, double sigma_min)
{
    const auto& r = filter.as_range();
    if (r.lo == r.hi) {
        return 0.0;
    }
    const auto t = nig_predictive(state);
    const double scale = std::max(std::sqrt(t.scale_squared), sigma_min);
    const double p = student_t_cdf((r.hi - t.mean) / scale, t.dof)
        - student_t_cdf((r.lo - t.mean) / scale, t.dof);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace softfacet
