#include "softfacet/dirichlet.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace softfacet {

DirichletState::DirichletState(std::vector<double> alpha) : m_alpha(std::move(alpha))
{
    if (m_alpha.empty()) {
        throw std::invalid_argument("Dirichlet state needs at least one component");
    }
    for (double a : m_alpha) {
        if (!std::isfinite(a) || !(a > 0.0)) {
            throw std::invalid_argument("Dirichlet components must be finite and positive");
        }
    }
}

double DirichletState::total() const noexcept
{
    return std::accumulate(m_alpha.begin(), m_alpha.end(), 0.0);
}

DirichletState categorical_prior_init(
    const Item& item, const BrandVocabulary& vocab, double own_brand_mass, double smoothing_mass)
{
    if (!(own_brand_mass > 0.0) || !(smoothing_mass > 0.0)) {
        throw std::invalid_argument("Dirichlet prior masses must be positive");
    }
    if (item.brand_index >= vocab.size()) {
        throw std::out_of_range("item brand index outside the vocabulary");
    }
    std::vector<double> alpha(vocab.size(), smoothing_mass);
    alpha[item.brand_index] += own_brand_mass;
    return DirichletState(std::move(alpha));
}

DirichletState dirichlet_update(const DirichletState& state, std::span<const BrandIndex> observations)
{
    std::vector<double> alpha = state.alpha();
    for (BrandIndex b : observations) {
        if (b >= alpha.size()) {
            throw std::out_of_range("brand observation index outside the vocabulary");
        }
        alpha[b] += 1.0;
    }
    return DirichletState(std::move(alpha));
}

std::vector<double> categorical_estimate(const DirichletState& state)
{
    const double total = state.total();
    std::vector<double> p;
    p.reserve(state.size());
    for (double a : state.alpha()) {
        p.push_back(a / total);
    }
    return p;
}

double categorical_likelihood(const DirichletState& state, const FacetFilter& filter)
{
    const auto index = filter.as_categorical().brand_index;
    if (index >= state.size()) {
        throw std::out_of_range("brand filter index outside the vocabulary");
    }
    return state.alpha()[index] / state.total();
}

}  // namespace softfacet
