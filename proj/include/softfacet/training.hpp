#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "softfacet/model_state.hpp"
#include "softfacet/reranker.hpp"
#include "softfacet/session_log.hpp"

namespace softfacet {

/// Every prior hyper-parameter and likelihood knob in one versioned document.
struct TrainingConfig {
    int version = 1;
    double own_brand_mass = 1.0;
    double smoothing_mass = 0.1;
    double kappa0 = 1.0;
    double alpha0 = 2.0;
    double beta0 = 2500.0;
    double open_end_width = 100.0;
    double sigma_min = 1e-6;
    Estimator estimator = Estimator::map;

    /// Throws std::invalid_argument when a knob is out of its domain.
    void validate() const;
    [[nodiscard]] LikelihoodOptions likelihood_options() const { return {estimator, sigma_min}; }
};

[[nodiscard]] nlohmann::json to_json(const TrainingConfig& config);
/// Missing keys keep their defaults. Throws std::invalid_argument on bad values.
[[nodiscard]] TrainingConfig training_config_from_json(const nlohmann::json& doc);

using QueryItemKey = std::pair<std::string, ItemId>;

struct Observations {
    std::vector<BrandIndex> brand_obs;
    std::vector<double> price_midpoints;
};

struct ObservationSet {
    std::map<QueryItemKey, Observations> by_pair;
    std::size_t purchasing_sessions = 0;
    std::size_t unknown_items = 0;
    std::size_t unknown_brands = 0;

    [[nodiscard]] std::size_t total_brand_observations() const;
    [[nodiscard]] std::size_t total_price_observations() const;
};

/// Attributes every filter action of a purchasing session to each purchased
/// item under the session's query. Unknown items and out-of-vocabulary brand
/// indices are skipped and counted.
[[nodiscard]] ObservationSet extract_observations(std::span<const Session> sessions,
                                                  const Catalog& catalog,
                                                  const TrainingConfig& config);

struct TrainingMetadata {
    std::size_t session_count = 0;
    std::string trained_at;
};

/// Per-(query, item) action-model states. Pairs without observations fall
/// back to their prior-initialized state.
class TrainedModel {
  public:
    TrainedModel(TrainingConfig config, BrandVocabulary brands);

    [[nodiscard]] const TrainingConfig& config() const noexcept { return m_config; }
    [[nodiscard]] const BrandVocabulary& brands() const noexcept { return m_brands; }
    [[nodiscard]] TrainingMetadata& metadata() noexcept { return m_metadata; }
    [[nodiscard]] const TrainingMetadata& metadata() const noexcept { return m_metadata; }

    [[nodiscard]] bool has_query(const std::string& query) const { return m_states.contains(query); }
    [[nodiscard]] const std::map<std::string, std::map<ItemId, ItemModelState>>& states() const noexcept
    {
        return m_states;
    }

    /// Learned state when present, otherwise the prior built from the item.
    [[nodiscard]] ItemModelState state_for(const std::string& query, const Item& item) const;
    [[nodiscard]] ItemModelState prior_state(const Item& item) const;
    void set_state(const std::string& query, ItemModelState state);

    /// Lookup over one query's states, for use with model_likelihood().
    [[nodiscard]] StateLookup lookup(const std::string& query) const;
    [[nodiscard]] ActionLikelihood likelihood(const std::string& query) const;

  private:
    TrainingConfig m_config;
    BrandVocabulary m_brands;
    TrainingMetadata m_metadata;
    std::map<std::string, std::map<ItemId, ItemModelState>> m_states;
};

/// Prior-initializes every observed (query, item) pair and applies one batch
/// conjugate update from its observations.
[[nodiscard]] TrainedModel train(const Catalog& catalog, std::span<const Session> sessions, const TrainingConfig& config);

/// Folds observations from `new_sessions` into the existing states.
[[nodiscard]] TrainedModel incremental_update(const TrainedModel& model,
                                              const Catalog& catalog,
                                              std::span<const Session> new_sessions);

/// {"version","config","brands","metadata","queries":{query:[state...]}}
[[nodiscard]] nlohmann::json to_json(const TrainedModel& model);
/// Throws std::invalid_argument on schema violations.
[[nodiscard]] TrainedModel trained_model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::string& path);
/// Throws DataError when the file cannot be read or parsed.
[[nodiscard]] TrainedModel load_model(const std::string& path);

}  // namespace softfacet
