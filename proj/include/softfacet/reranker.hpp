#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "softfacet/facets.hpp"
#include "softfacet/model_state.hpp"

namespace softfacet {

/// Normalized prior over items, kept in canonical ranking order:
/// probability descending, then item id ascending.
class PriorPropensity {
  public:
    struct Entry {
        ItemId item_id;
        double probability = 0.0;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    /// Throws std::invalid_argument when empty, when ids repeat, when a
    /// probability is negative or non-finite, or when the sum is not 1 within 1e-9.
    explicit PriorPropensity(std::vector<Entry> entries);

    [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return m_entries; }
    [[nodiscard]] std::size_t size() const noexcept { return m_entries.size(); }
    /// Probability of `id`, or 0 when the item is not part of the prior.
    [[nodiscard]] double probability(const ItemId& id) const;

  private:
    std::vector<Entry> m_entries;
};

struct RankedEntry {
    ItemId item_id;
    double score = 0.0;
    bool within_filter = true;
};

/// Scores are nonincreasing; `within_filter` marks literal filter satisfaction.
using RankedList = std::vector<RankedEntry>;

enum class RankMode { soft, hard };
enum class Estimator { map, predictive };

[[nodiscard]] std::string to_string(RankMode mode);
/// Throws std::invalid_argument for anything other than "soft" / "hard".
[[nodiscard]] RankMode parse_rank_mode(const std::string& text);
[[nodiscard]] std::string to_string(Estimator estimator);
[[nodiscard]] Estimator parse_estimator(const std::string& text);

/// p(filter | item).
using ActionLikelihood = std::function<double(const Item&, const FacetFilter&)>;

/// Looks up (or default-initializes) the action-model state of an item.
using StateLookup = std::function<ItemModelState(const Item&)>;

struct LikelihoodOptions {
    Estimator estimator = Estimator::map;
    double sigma_min = 1e-6;
};

/// Likelihood of one filter under an item's learned models: the categorical
/// estimate for brand filters, the MAP Gaussian or the Student-t predictive for ranges.
[[nodiscard]] double action_likelihood(const ItemModelState& state,
                                       const FacetFilter& filter,
                                       const LikelihoodOptions& options = {});

[[nodiscard]] ActionLikelihood model_likelihood(StateLookup lookup, LikelihoodOptions options = {});

/// 1 when the item literally satisfies the filter, else 0 (the hard-filter action model).
[[nodiscard]] ActionLikelihood indicator_likelihood();

/// Raised when a filter leaves no item with positive mass.
class EmptyPosteriorError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// p(e) = score(e) / sum of scores. Throws std::invalid_argument on negative
/// or non-finite scores, duplicate ids, an empty list, or an all-zero list.
[[nodiscard]] PriorPropensity normalize_prior(std::span<const std::pair<ItemId, double>> scores);

struct RerankResult {
    RankedList ranked;
    PriorPropensity posterior;
};

/// One step of Bayesian re-ranking.
///
/// Soft mode ranks every prior item by prior(e) * likelihood(filter | e),
/// ties broken by prior rank. Hard mode keeps only items that satisfy the
/// filter, in prior order. The returned posterior feeds the next action.
/// Throws EmptyPosteriorError when no item keeps positive mass and
/// std::out_of_range for prior items missing from the catalog.
[[nodiscard]] RerankResult rerank(const PriorPropensity& prior,
                                  const FacetFilter& filter,
                                  const Catalog& catalog,
                                  const ActionLikelihood& likelihood,
                                  RankMode mode);

/// Traditional facet filtering: satisfying items only, in prior order.
[[nodiscard]] RankedList hard_filter(const PriorPropensity& prior, const FacetFilter& filter, const Catalog& catalog);

/// The prior itself as a ranked list.
[[nodiscard]] RankedList ranked_from_prior(const PriorPropensity& prior);

/// 1-based position of `id`, or 0 when absent.
[[nodiscard]] std::size_t rank_of(const RankedList& list, const ItemId& id);

/// One user's interactive browsing state.
struct BrowseSession {
    std::string session_id;
    std::string query;
    PriorPropensity base_propensity;
    PriorPropensity current_propensity;
    std::vector<FacetFilter> applied_filters;
    RankedList ranked;

    static BrowseSession start(std::string session_id, std::string query, PriorPropensity prior);
};

/// Folds `rerank` over `filters`, threading the posterior as the next prior,
/// and appends them to the session's applied filters. `within_filter` in the
/// resulting list reflects every applied filter.
[[nodiscard]] BrowseSession apply_filter_sequence(const BrowseSession& session,
                                                  std::span<const FacetFilter> filters,
                                                  const Catalog& catalog,
                                                  const ActionLikelihood& likelihood,
                                                  RankMode mode);

/// Recomputes the session from its base prior with `filters` as the full applied list.
[[nodiscard]] BrowseSession replay_filters(const BrowseSession& session,
                                           std::vector<FacetFilter> filters,
                                           const Catalog& catalog,
                                           const ActionLikelihood& likelihood,
                                           RankMode mode);

}  // namespace softfacet
