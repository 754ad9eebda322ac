#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "softfacet/session_log.hpp"
#include "softfacet/training.hpp"

namespace softfacet {

/// Pass/fail thresholds applied by `evaluate --check`.
struct CheckThresholds {
    std::optional<double> miss_rate_target;
    double miss_rate_tolerance = 0.03;
    /// Per-query significance level and how many queries must reach it.
    std::optional<double> p_threshold;
    std::size_t min_significant_queries = 0;
    /// Require mean soft rank < mean hard rank on every query.
    bool require_mean_improvement = false;
    /// Largest allowed (mean soft - mean hard) on any query.
    std::optional<double> max_mean_regression;
};

/// Knobs of a synthetic catalog + log generator.
struct ScenarioConfig {
    std::string name = "scenario";
    std::size_t n_queries = 20;
    std::size_t items_per_query = 200;
    std::size_t n_brands = 25;
    double price_min = 10.0;
    double price_max = 1000.0;
    double zipf_exponent = 1.0;
    double bucket_width = 50.0;
    /// True price-selection noise as a multiple of the bucket width. When
    /// unset it is solved from `target_miss_rate`.
    std::optional<double> price_noise_ratio;
    double target_miss_rate = 0.43;
    double sigma_min = 1e-6;
    /// Probability that a session also selects a brand filter.
    double brand_action_prob = 0.0;
    /// Mass the true brand-selection vector puts on the item's own brand; the
    /// rest goes to its two neighbouring brands.
    double own_brand_selection = 0.7;
    std::size_t sessions_per_query = 700;
    std::uint64_t seed = 1;
    TrainingConfig training;
    CheckThresholds check;

    /// Throws std::invalid_argument on out-of-domain knobs.
    void validate() const;
};

[[nodiscard]] nlohmann::json to_json(const ScenarioConfig& config);
/// Missing keys keep their defaults.
[[nodiscard]] ScenarioConfig scenario_config_from_json(const nlohmann::json& doc);
[[nodiscard]] ScenarioConfig load_scenario_config(const std::string& path);

/// (price, purchase weight) of one item.
using PricedWeight = std::pair<double, double>;

/// Expected fraction of simulated price filters that exclude the purchased
/// item, when purchases follow `items` weights and the selected value is
/// N(price, (ratio * width)^2) snapped to the width-aligned bucket grid
/// (values below zero land in the first bucket).
[[nodiscard]] double expected_miss_rate(std::span<const PricedWeight> items, double bucket_width, double noise_ratio);

/// Solves expected_miss_rate(items, width, ratio) = target for ratio by
/// bisection. Throws std::invalid_argument when the target is unreachable.
[[nodiscard]] double calibrate_noise_ratio(std::span<const PricedWeight> items,
                                           double bucket_width,
                                           double target_miss_rate);

/// Ground-truth action parameters of one item.
struct TrueActionModel {
    double price_mean = 0.0;
    double price_sigma = 1.0;
    std::vector<double> brand_probs;
};

struct QueryScenario {
    std::string query;
    /// Relevance scores of the items this query returns.
    std::vector<std::pair<ItemId, double>> scores;
};

struct SyntheticScenario {
    ScenarioConfig config;
    /// True price-selection sigma divided by the bucket width.
    double noise_ratio = 0.0;
    Catalog catalog;
    std::vector<QueryScenario> queries;
    std::map<ItemId, TrueActionModel> truth;
};

/// Deterministic in `config.seed`. Each query gets its own item set with
/// log-uniform prices, uniform brands, and Zipf relevance over a shuffled order.
[[nodiscard]] SyntheticScenario build_scenario(const ScenarioConfig& config);

/// Simulated purchasing sessions: the purchase is drawn from the query's
/// normalized relevance, a price value from the item's true Gaussian snapped
/// to its enclosing bucket, and optionally a brand from the true selection
/// vector. Deterministic per (seed, query index). Throws std::invalid_argument
/// when sessions_per_query is 0.
[[nodiscard]] std::vector<Session> generate_synthetic_log(const SyntheticScenario& scenario,
                                                          std::size_t sessions_per_query,
                                                          std::uint64_t seed);

/// Fraction of price filters in purchasing sessions whose closed range
/// excludes the purchased item's price. Throws std::domain_error when no
/// session qualifies.
[[nodiscard]] double measure_miss_rate(std::span<const Session> sessions, const Catalog& catalog);

}  // namespace softfacet
