#include "softfacet/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "softfacet/dirichlet.hpp"
#include "softfacet/nig.hpp"

namespace softfacet {

namespace {

constexpr double kNormalizationTolerance = 1e-9;

bool canonical_order(const PriorPropensity::Entry& a, const PriorPropensity::Entry& b)
{
    if (a.probability != b.probability) {
        return a.probability > b.probability;
    }
    return a.item_id < b.item_id;
}

// Builds a normalized propensity from unnormalized masses without re-checking the sum.
PriorPropensity normalized(std::vector<PriorPropensity::Entry> masses)
{
    double total = 0.0;
    for (const auto& e : masses) {
        total += e.probability;
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw EmptyPosteriorError("no item keeps positive mass under the applied filter");
    }
    for (auto& e : masses) {
        e.probability /= total;
    }
    return PriorPropensity(std::move(masses));
}

bool matches_all(const Item& item, std::span<const FacetFilter> filters)
{
    return std::all_of(filters.begin(), filters.end(), [&](const FacetFilter& f) { return f.matches(item); });
}

}  // namespace

PriorPropensity::PriorPropensity(std::vector<Entry> entries) : m_entries(std::move(entries))
{
    if (m_entries.empty()) {
        throw std::invalid_argument("prior propensity must contain at least one item");
    }
    std::unordered_set<ItemId> seen;
    double total = 0.0;
    for (const auto& e : m_entries) {
        if (!std::isfinite(e.probability) || e.probability < 0.0) {
            throw std::invalid_argument("prior probability of " + e.item_id + " is invalid");
        }
        if (!seen.insert(e.item_id).second) {
            throw std::invalid_argument("duplicate item in prior: " + e.item_id);
        }
        total += e.probability;
    }
    if (std::fabs(total - 1.0) > kNormalizationTolerance) {
        throw std::invalid_argument("prior probabilities do not sum to 1");
    }
    std::sort(m_entries.begin(), m_entries.end(), canonical_order);
}

double PriorPropensity::probability(const ItemId& id) const
{
    auto it = std::find_if(m_entries.begin(), m_entries.end(), [&](const Entry& e) { return e.item_id == id; });
    return it == m_entries.end() ? 0.0 : it->probability;
}

std::string to_string(RankMode mode)
{
    return mode == RankMode::soft ? "soft" : "hard";
}

RankMode parse_rank_mode(const std::string& text)
{
    if (text == "soft") {
        return RankMode::soft;
    }
    if (text == "hard") {
        return RankMode::hard;
    }
    throw std::invalid_argument("unknown rank mode: " + text);
}

std::string to_string(Estimator estimator)
{
    return estimator == Estimator::map ? "map" : "predictive";
}

Estimator parse_estimator(const std::string& text)
{
    if (text == "map") {
        return Estimator::map;
    }
    if (text == "predictive") {
        return Estimator::predictive;
    }
    throw std::invalid_argument("unknown estimator: " + text);
}

double action_likelihood(const ItemModelState& state, const FacetFilter& filter, const LikelihoodOptions& options)
{
    if (filter.is_categorical()) {
        return categorical_likelihood(state.dirichlet, filter);
    }
    if (options.estimator == Estimator::predictive) {
        return nig_predictive_range_likelihood(state.nig, filter, options.sigma_min);
    }
    return nig_map_range_likelihood(state.nig, filter, options.sigma_min);
}

ActionLikelihood model_likelihood(StateLookup lookup, LikelihoodOptions options)
{
    return [lookup = std::move(lookup), options](const Item& item, const FacetFilter& filter) {
        return action_likelihood(lookup(item), filter, options);
    };
}

ActionLikelihood indicator_likelihood()
{
    return [](const Item& item, const FacetFilter& filter) { return filter.matches(item) ? 1.0 : 0.0; };
}

PriorPropensity normalize_prior(std::span<const std::pair<ItemId, double>> scores)
{
    if (scores.empty()) {
        throw std::invalid_argument("no relevance scores to normalize");
    }
    double total = 0.0;
    for (const auto& [id, score] : scores) {
        if (!std::isfinite(score) || score < 0.0) {
            throw std::invalid_argument("relevance score of " + id + " must be finite and nonnegative");
        }
        total += score;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("all relevance scores are zero");
    }
    std::vector<PriorPropensity::Entry> entries;
    entries.reserve(scores.size());
    for (const auto& [id, score] : scores) {
        entries.push_back({id, score / total});
    }
    return PriorPropensity(std::move(entries));
}

RerankResult rerank(const PriorPropensity& prior,
                    const FacetFilter& filter,
                    const Catalog& catalog,
                    const ActionLikelihood& likelihood,
                    RankMode mode)
{
    const auto& entries = prior.entries();

    if (mode == RankMode::hard) {
        std::vector<PriorPropensity::Entry> survivors;
        for (const auto& e : entries) {
            if (filter.matches(catalog.at(e.item_id))) {
                survivors.push_back(e);
            }
        }
        auto posterior = normalized(survivors);
        RankedList ranked;
        ranked.reserve(survivors.size());
        for (const auto& e : posterior.entries()) {
            ranked.push_back({e.item_id, e.probability, true});
        }
        return {std::move(ranked), std::move(posterior)};
    }

    struct Scored {
        std::size_t prior_rank;
        const Item* item;
        double mass;
    };
    std::vector<Scored> scored;
    scored.reserve(entries.size());
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Item& item = catalog.at(entries[i].item_id);
        const double l = likelihood(item, filter);
        if (!std::isfinite(l) || l < 0.0) {
            throw std::domain_error("action likelihood must be finite and nonnegative");
        }
        const double mass = entries[i].probability * l;
        scored.push_back({i, &item, mass});
        total += mass;
    }
    if (!(total > 0.0)) {
        throw EmptyPosteriorError("no item keeps positive mass under the applied filter");
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.mass != b.mass) {
            return a.mass > b.mass;
        }
        return a.prior_rank < b.prior_rank;
    });

    RankedList ranked;
    ranked.reserve(scored.size());
    std::vector<PriorPropensity::Entry> posterior_entries;
    posterior_entries.reserve(scored.size());
    for (const auto& s : scored) {
        const double p = s.mass / total;
        ranked.push_back({s.item->id, p, filter.matches(*s.item)});
        posterior_entries.push_back({s.item->id, p});
    }
    return {std::move(ranked), PriorPropensity(std::move(posterior_entries))};
}

RankedList hard_filter(const PriorPropensity& prior, const FacetFilter& filter, const Catalog& catalog)
{
    RankedList ranked;
    double total = 0.0;
    for (const auto& e : prior.entries()) {
        if (filter.matches(catalog.at(e.item_id))) {
            ranked.push_back({e.item_id, e.probability, true});
            total += e.probability;
        }
    }
    if (total > 0.0) {
        for (auto& r : ranked) {
            r.score /= total;
        }
    }
    return ranked;
}

RankedList ranked_from_prior(const PriorPropensity& prior)
{
    RankedList ranked;
    ranked.reserve(prior.size());
    for (const auto& e : prior.entries()) {
        ranked.push_back({e.item_id, e.probability, true});
    }
    return ranked;
}

std::size_t rank_of(const RankedList& list, const ItemId& id)
{
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].item_id == id) {
            return i + 1;
        }
    }
    return 0;
}

BrowseSession BrowseSession::start(std::string session_id, std::string query, PriorPropensity prior)
{
    auto ranked = ranked_from_prior(prior);
    return BrowseSession{std::move(session_id), std::move(query), prior, prior, {}, std::move(ranked)};
}

BrowseSession apply_filter_sequence(const BrowseSession& session,
                                    std::span<const FacetFilter> filters,
                                    const Catalog& catalog,
                                    const ActionLikelihood& likelihood,
                                    RankMode mode)
{
    BrowseSession next = session;
    for (const auto& filter : filters) {
        auto result = rerank(next.current_propensity, filter, catalog, likelihood, mode);
        next.current_propensity = std::move(result.posterior);
        next.ranked = std::move(result.ranked);
        next.applied_filters.push_back(filter);
    }
    if (!filters.empty()) {
        for (auto& entry : next.ranked) {
            entry.within_filter = matches_all(catalog.at(entry.item_id), next.applied_filters);
        }
    }
    return next;
}

BrowseSession replay_filters(const BrowseSession& session,
                             std::vector<FacetFilter> filters,
                             const Catalog& catalog,
                             const ActionLikelihood& likelihood,
                             RankMode mode)
{
    auto fresh = BrowseSession::start(session.session_id, session.query, session.base_propensity);
    return apply_filter_sequence(fresh, filters, catalog, likelihood, mode);
}

}  // namespace softfacet
