#pragma once

#include <span>
#include <vector>

#include "softfacet/facets.hpp"

namespace softfacet {

/// Dirichlet hyper-parameters (pseudo-counts) over the brand vocabulary.
class DirichletState {
  public:
    /// Throws std::invalid_argument unless `alpha` is non-empty with every
    /// component finite and strictly positive.
    explicit DirichletState(std::vector<double> alpha);

    [[nodiscard]] const std::vector<double>& alpha() const noexcept { return m_alpha; }
    [[nodiscard]] std::size_t size() const noexcept { return m_alpha.size(); }
    [[nodiscard]] double total() const noexcept;

    friend bool operator==(const DirichletState&, const DirichletState&) = default;

  private:
    std::vector<double> m_alpha;
};

/// Prior that puts `own_brand_mass` on the item's brand on top of a uniform
/// `smoothing_mass` on every brand.
[[nodiscard]] DirichletState categorical_prior_init(
    const Item& item, const BrandVocabulary& vocab, double own_brand_mass, double smoothing_mass);

/// Conjugate update: adds one pseudo-count per observed brand index.
/// Throws std::out_of_range for an index outside the vocabulary.
[[nodiscard]] DirichletState dirichlet_update(const DirichletState& state,
                                              std::span<const BrandIndex> observations);

/// Posterior mean of the selection probabilities (coincides with the
/// predictive distribution).
[[nodiscard]] std::vector<double> categorical_estimate(const DirichletState& state);

/// Probability that a user interested in the item selects `filter`.
/// Throws std::invalid_argument for range filters, std::out_of_range for a bad index.
[[nodiscard]] double categorical_likelihood(const DirichletState& state, const FacetFilter& filter);

}  // namespace softfacet
