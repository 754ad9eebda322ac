#include "softfacet/training.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace softfacet {

using nlohmann::json;

namespace {

void require_positive(double value, const char* name)
{
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw std::invalid_argument(std::string("training config: ") + name + " must be finite and positive");
    }
}

}  // namespace

void TrainingConfig::validate() const
{
    if (version != 1) {
        throw std::invalid_argument("training config: unsupported version " + std::to_string(version));
    }
    require_positive(own_brand_mass, "own_brand_mass");
    require_positive(smoothing_mass, "smoothing_mass");
    require_positive(kappa0, "kappa0");
    require_positive(alpha0, "alpha0");
    require_positive(beta0, "beta0");
    require_positive(open_end_width, "open_end_width");
    require_positive(sigma_min, "sigma_min");
}

json to_json(const TrainingConfig& config)
{
    return {
        {"version", config.version},
        {"own_brand_mass", config.own_brand_mass},
        {"smoothing_mass", config.smoothing_mass},
        {"kappa0", config.kappa0},
        {"alpha0", config.alpha0},
        {"beta0", config.beta0},
        {"open_end_width", config.open_end_width},
        {"sigma_min", config.sigma_min},
        {"estimator", to_string(config.estimator)},
    };
}

TrainingConfig training_config_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw std::invalid_argument("training config must be a JSON object");
    }
    TrainingConfig c;
    try {
        c.version = doc.value("version", c.version);
        c.own_brand_mass = doc.value("own_brand_mass", c.own_brand_mass);
        c.smoothing_mass = doc.value("smoothing_mass", c.smoothing_mass);
        c.kappa0 = doc.value("kappa0", c.kappa0);
        c.alpha0 = doc.value("alpha0", c.alpha0);
        c.beta0 = doc.value("beta0", c.beta0);
        c.open_end_width = doc.value("open_end_width", c.open_end_width);
        c.sigma_min = doc.value("sigma_min", c.sigma_min);
        c.estimator = parse_estimator(doc.value("estimator", to_string(c.estimator)));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("training config: ") + e.what());
    }
    c.validate();
    return c;
}

std::size_t ObservationSet::total_brand_observations() const
{
    std::size_t n = 0;
    for (const auto& [key, obs] : by_pair) {
        n += obs.brand_obs.size();
    }
    return n;
}

std::size_t ObservationSet::total_price_observations() const
{
    std::size_t n = 0;
    for (const auto& [key, obs] : by_pair) {
        n += obs.price_midpoints.size();
    }
    return n;
}

ObservationSet extract_observations(std::span<const Session> sessions,
                                    const Catalog& catalog,
                                    const TrainingConfig& config)
{
    ObservationSet set;
    for (const auto& session : sessions) {
        if (session.purchases.empty()) {
            continue;
        }
        ++set.purchasing_sessions;
        for (const auto& purchased : session.purchases) {
            if (catalog.find(purchased) == nullptr) {
                ++set.unknown_items;
                continue;
            }
            auto& obs = set.by_pair[{session.query, purchased}];
            for (const auto& action : session.actions) {
                if (action.is_categorical()) {
                    const auto b = action.as_categorical().brand_index;
                    if (b >= catalog.brands().size()) {
                        ++set.unknown_brands;
                        continue;
                    }
                    obs.brand_obs.push_back(b);
                } else {
                    obs.price_midpoints.push_back(range_midpoint(action, config.open_end_width));
                }
            }
        }
    }
    return set;
}

TrainedModel::TrainedModel(TrainingConfig config, BrandVocabulary brands)
    : m_config(config), m_brands(std::move(brands))
{
    m_config.validate();
}

ItemModelState TrainedModel::prior_state(const Item& item) const
{
    return ItemModelState{
        item.id,
        categorical_prior_init(item, m_brands, m_config.own_brand_mass, m_config.smoothing_mass),
        nig_prior_init(item, m_config.kappa0, m_config.alpha0, m_config.beta0),
    };
}

ItemModelState TrainedModel::state_for(const std::string& query, const Item& item) const
{
    if (auto q = m_states.find(query); q != m_states.end()) {
        if (auto it = q->second.find(item.id); it != q->second.end()) {
            return it->second;
        }
    }
    return prior_state(item);
}

void TrainedModel::set_state(const std::string& query, ItemModelState state)
{
    if (state.dirichlet.size() != m_brands.size()) {
        throw std::invalid_argument("state for " + state.item_id + " does not match the brand vocabulary");
    }
    auto id = state.item_id;
    m_states[query].insert_or_assign(std::move(id), std::move(state));
}

StateLookup TrainedModel::lookup(const std::string& query) const
{
    return [this, query](const Item& item) { return state_for(query, item); };
}

ActionLikelihood TrainedModel::likelihood(const std::string& query) const
{
    return model_likelihood(lookup(query), m_config.likelihood_options());
}

namespace {

void fold_observations(TrainedModel& model, const Catalog& catalog, const ObservationSet& set)
{
    for (const auto& [key, obs] : set.by_pair) {
        const auto& [query, item_id] = key;
        auto state = model.state_for(query, catalog.at(item_id));
        state.dirichlet = dirichlet_update(state.dirichlet, obs.brand_obs);
        state.nig = nig_update(state.nig, obs.price_midpoints);
        model.set_state(query, std::move(state));
    }
    model.metadata().session_count += set.purchasing_sessions;
}

}  // namespace

TrainedModel train(const Catalog& catalog, std::span<const Session> sessions, const TrainingConfig& config)
{
    TrainedModel model(config, catalog.brands());
    fold_observations(model, catalog, extract_observations(sessions, catalog, config));
    return model;
}

TrainedModel incremental_update(const TrainedModel& model, const Catalog& catalog, std::span<const Session> new_sessions)
{
    TrainedModel next = model;
    fold_observations(next, catalog, extract_observations(new_sessions, catalog, model.config()));
    return next;
}

json to_json(const TrainedModel& model)
{
    json queries = json::object();
    for (const auto& [query, states] : model.states()) {
        json list = json::array();
        for (const auto& [id, state] : states) {
            list.push_back(to_json(state));
        }
        queries[query] = std::move(list);
    }
    return {
        {"version", 1},
        {"config", to_json(model.config())},
        {"brands", model.brands().names()},
        {"metadata",
         {{"session_count", model.metadata().session_count}, {"trained_at", model.metadata().trained_at}}},
        {"queries", std::move(queries)},
    };
}

TrainedModel trained_model_from_json(const json& doc)
{
    try {
        if (doc.at("version").get<int>() != 1) {
            throw std::invalid_argument("unsupported model version");
        }
        TrainedModel model(training_config_from_json(doc.at("config")),
                           BrandVocabulary(doc.at("brands").get<std::vector<std::string>>()));
        if (doc.contains("metadata")) {
            const auto& meta = doc.at("metadata");
            model.metadata().session_count = meta.value("session_count", std::size_t{0});
            model.metadata().trained_at = meta.value("trained_at", std::string{});
        }
        for (const auto& [query, list] : doc.at("queries").items()) {
            for (const auto& state : list) {
                model.set_state(query, item_model_state_from_json(state));
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << to_json(model).dump(2) << '\n';
}

TrainedModel load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return trained_model_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace softfacet
