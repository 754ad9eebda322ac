#include "softfacet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "softfacet/special_functions.hpp"

namespace softfacet {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t stream_id)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream_id + 0x5bd1e995ULL)));
}

std::string padded(std::size_t value, int width)
{
    auto s = std::to_string(value);
    if (static_cast<int>(s.size()) < width) {
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    }
    return s;
}

json check_to_json(const CheckThresholds& c)
{
    json doc = json::object();
    if (c.miss_rate_target) {
        doc["miss_rate_target"] = *c.miss_rate_target;
        doc["miss_rate_tolerance"] = c.miss_rate_tolerance;
    }
    if (c.p_threshold) {
        doc["p_threshold"] = *c.p_threshold;
        doc["min_significant_queries"] = c.min_significant_queries;
    }
    doc["require_mean_improvement"] = c.require_mean_improvement;
    if (c.max_mean_regression) {
        doc["max_mean_regression"] = *c.max_mean_regression;
    }
    return doc;
}

CheckThresholds check_from_json(const json& doc)
{
    CheckThresholds c;
    if (doc.contains("miss_rate_target")) {
        c.miss_rate_target = doc.at("miss_rate_target").get<double>();
    }
    c.miss_rate_tolerance = doc.value("miss_rate_tolerance", c.miss_rate_tolerance);
    if (doc.contains("p_threshold")) {
        c.p_threshold = doc.at("p_threshold").get<double>();
    }
    c.min_significant_queries = doc.value("min_significant_queries", c.min_significant_queries);
    c.require_mean_improvement = doc.value("require_mean_improvement", c.require_mean_improvement);
    if (doc.contains("max_mean_regression")) {
        c.max_mean_regression = doc.at("max_mean_regression").get<double>();
    }
    return c;
}

}  // namespace

void ScenarioConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
    if (n_queries == 0 || items_per_query == 0 || n_brands == 0) {
        fail("n_queries, items_per_query and n_brands must be positive");
    }
    if (!(price_min > 0.0) || !(price_max >= price_min) || !std::isfinite(price_max)) {
        fail("prices must satisfy 0 < price_min <= price_max < inf");
    }
    if (!(zipf_exponent >= 0.0) || !std::isfinite(zipf_exponent)) {
        fail("zipf_exponent must be finite and nonnegative");
    }
    if (!(bucket_width > 0.0) || !std::isfinite(bucket_width)) {
        fail("bucket_width must be positive");
    }
    if (price_noise_ratio && (!(*price_noise_ratio >= 0.0) || !std::isfinite(*price_noise_ratio))) {
        fail("price_noise_ratio must be finite and nonnegative");
    }
    if (!price_noise_ratio && !(target_miss_rate >= 0.0 && target_miss_rate < 1.0)) {
        fail("target_miss_rate must lie in [0, 1)");
    }
    if (!(sigma_min > 0.0)) {
        fail("sigma_min must be positive");
    }
    if (!(brand_action_prob >= 0.0 && brand_action_prob <= 1.0)) {
        fail("brand_action_prob must lie in [0, 1]");
    }
    if (!(own_brand_selection > 0.0 && own_brand_selection <= 1.0)) {
        fail("own_brand_selection must lie in (0, 1]");
    }
    training.validate();
}

json to_json(const ScenarioConfig& c)
{
    json doc = {
        {"name", c.name},
        {"n_queries", c.n_queries},
        {"items_per_query", c.items_per_query},
        {"n_brands", c.n_brands},
        {"price_min", c.price_min},
        {"price_max", c.price_max},
        {"zipf_exponent", c.zipf_exponent},
        {"bucket_width", c.bucket_width},
        {"target_miss_rate", c.target_miss_rate},
        {"sigma_min", c.sigma_min},
        {"brand_action_prob", c.brand_action_prob},
        {"own_brand_selection", c.own_brand_selection},
        {"sessions_per_query", c.sessions_per_query},
        {"seed", c.seed},
        {"training", to_json(c.training)},
        {"check", check_to_json(c.check)},
    };
    if (c.price_noise_ratio) {
        doc["price_noise_ratio"] = *c.price_noise_ratio;
    }
    return doc;
}

ScenarioConfig scenario_config_from_json(const json& doc)
{
    if (!doc.is_object()) {
        throw std::invalid_argument("scenario must be a JSON object");
    }
    ScenarioConfig c;
    try {
        c.name = doc.value("name", c.name);
        c.n_queries = doc.value("n_queries", c.n_queries);
        c.items_per_query = doc.value("items_per_query", c.items_per_query);
        c.n_brands = doc.value("n_brands", c.n_brands);
        c.price_min = doc.value("price_min", c.price_min);
        c.price_max = doc.value("price_max", c.price_max);
        c.zipf_exponent = doc.value("zipf_exponent", c.zipf_exponent);
        c.bucket_width = doc.value("bucket_width", c.bucket_width);
        if (doc.contains("price_noise_ratio") && !doc.at("price_noise_ratio").is_null()) {
            c.price_noise_ratio = doc.at("price_noise_ratio").get<double>();
        }
        c.target_miss_rate = doc.value("target_miss_rate", c.target_miss_rate);
        c.sigma_min = doc.value("sigma_min", c.sigma_min);
        c.brand_action_prob = doc.value("brand_action_prob", c.brand_action_prob);
        c.own_brand_selection = doc.value("own_brand_selection", c.own_brand_selection);
        c.sessions_per_query = doc.value("sessions_per_query", c.sessions_per_query);
        c.seed = doc.value("seed", c.seed);
        if (doc.contains("training")) {
            c.training = training_config_from_json(doc.at("training"));
        }
        if (doc.contains("check")) {
            c.check = check_from_json(doc.at("check"));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: ") + e.what());
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return scenario_config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

double expected_miss_rate(std::span<const PricedWeight> items, double bucket_width, double noise_ratio)
{
    if (!(bucket_width > 0.0)) {
        throw std::invalid_argument("bucket width must be positive");
    }
    double total_weight = 0.0;
    double missed = 0.0;
    for (const auto& [price, weight] : items) {
        total_weight += weight;
        if (!(noise_ratio > 0.0)) {
            continue;
        }
        const double sigma = noise_ratio * bucket_width;
        const double bucket = std::floor(price / bucket_width);
        const double hi = (bucket + 1.0) * bucket_width;
        const double lo = bucket <= 0.0 ? -kInfinity : bucket * bucket_width;
        const double covered = std_normal_cdf((hi - price) / sigma) - std_normal_cdf((lo - price) / sigma);
        missed += weight * (1.0 - covered);
    }
    if (!(total_weight > 0.0)) {
        throw std::invalid_argument("expected_miss_rate needs positive purchase weight");
    }
    return std::clamp(missed / total_weight, 0.0, 1.0);
}

double calibrate_noise_ratio(std::span<const PricedWeight> items, double bucket_width, double target_miss_rate)
{
    if (!(target_miss_rate >= 0.0 && target_miss_rate < 1.0)) {
        throw std::invalid_argument("target miss rate must lie in [0, 1)");
    }
    if (target_miss_rate == 0.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (expected_miss_rate(items, bucket_width, hi) < target_miss_rate) {
        hi *= 2.0;
        if (hi > 1e6) {
            throw std::invalid_argument("target miss rate is not reachable for this catalog");
        }
    }
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (expected_miss_rate(items, bucket_width, mid) < target_miss_rate ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SyntheticScenario build_scenario(const ScenarioConfig& config)
{
    config.validate();
    SyntheticScenario scenario;
    scenario.config = config;

    for (std::size_t b = 0; b < config.n_brands; ++b) {
        scenario.catalog.brands().intern("brand-" + padded(b, 2));
    }
    const std::size_t k = config.n_brands;

    for (std::size_t q = 0; q < config.n_queries; ++q) {
        auto rng = stream(config.seed, 2 * q);
        std::uniform_real_distribution<double> log_price(std::log(config.price_min), std::log(config.price_max));
        std::uniform_int_distribution<std::size_t> brand_dist(0, k - 1);

        QueryScenario query;
        query.query = "query-" + padded(q, 2);
        std::vector<ItemId> ids;
        for (std::size_t i = 0; i < config.items_per_query; ++i) {
            Item item;
            item.id = "q" + padded(q, 2) + "-item" + padded(i, 4);
            item.brand_index = brand_dist(rng);
            item.price = std::round(std::exp(log_price(rng)) * 100.0) / 100.0;
            item.title = scenario.catalog.brands().name(item.brand_index) + " product " + padded(i, 4);

            TrueActionModel truth;
            truth.price_mean = item.price;
            truth.brand_probs.assign(k, 0.0);
            if (k == 1) {
                truth.brand_probs[0] = 1.0;
            } else {
                const double rest = 1.0 - config.own_brand_selection;
                truth.brand_probs[item.brand_index] = config.own_brand_selection;
                const std::size_t up = (item.brand_index + 1) % k;
                const std::size_t down = (item.brand_index + k - 1) % k;
                truth.brand_probs[up] += 0.5 * rest;
                truth.brand_probs[down] += 0.5 * rest;
            }
            scenario.truth.emplace(item.id, std::move(truth));
            ids.push_back(item.id);
            scenario.catalog.add(std::move(item));
        }
        std::shuffle(ids.begin(), ids.end(), rng);
        for (std::size_t r = 0; r < ids.size(); ++r) {
            query.scores.emplace_back(ids[r], 1.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent));
        }
        scenario.queries.push_back(std::move(query));
    }

    if (config.price_noise_ratio) {
        scenario.noise_ratio = *config.price_noise_ratio;
    } else {
        // Every query receives the same number of sessions, so each query's
        // normalized relevance is weighted equally.
        std::vector<PricedWeight> weighted;
        for (const auto& query : scenario.queries) {
            double total = 0.0;
            for (const auto& [id, score] : query.scores) {
                total += score;
            }
            for (const auto& [id, score] : query.scores) {
                weighted.emplace_back(scenario.catalog.at(id).price, score / total);
            }
        }
        scenario.noise_ratio = calibrate_noise_ratio(weighted, config.bucket_width, config.target_miss_rate);
    }
    const double sigma = std::max(scenario.noise_ratio * config.bucket_width, config.sigma_min);
    for (auto& [id, truth] : scenario.truth) {
        truth.price_sigma = sigma;
    }
    return scenario;
}

std::vector<Session> generate_synthetic_log(const SyntheticScenario& scenario,
                                            std::size_t sessions_per_query,
                                            std::uint64_t seed)
{
    if (sessions_per_query == 0) {
        throw std::invalid_argument("sessions_per_query must be at least 1");
    }
    const double width = scenario.config.bucket_width;
    std::vector<Session> sessions;
    sessions.reserve(sessions_per_query * scenario.queries.size());

    for (std::size_t q = 0; q < scenario.queries.size(); ++q) {
        const auto& query = scenario.queries[q];
        auto rng = stream(seed, 2 * q + 1);
        std::vector<double> weights;
        weights.reserve(query.scores.size());
        for (const auto& [id, score] : query.scores) {
            weights.push_back(score);
        }
        std::discrete_distribution<std::size_t> pick_item(weights.begin(), weights.end());
        std::normal_distribution<double> noise(0.0, 1.0);
        std::uniform_real_distribution<double> coin(0.0, 1.0);

        for (std::size_t s = 0; s < sessions_per_query; ++s) {
            const auto& item_id = query.scores[pick_item(rng)].first;
            const auto& truth = scenario.truth.at(item_id);

            Session session;
            session.session_id = query.query + "-s" + padded(s, 5);
            session.query = query.query;
            session.purchases.push_back(item_id);

            const double value = truth.price_mean + truth.price_sigma * noise(rng);
            const double bucket = std::max(0.0, std::floor(value / width));
            session.actions.push_back(FacetFilter::range(bucket * width, (bucket + 1.0) * width));

            if (scenario.config.brand_action_prob > 0.0 && coin(rng) < scenario.config.brand_action_prob) {
                std::discrete_distribution<std::size_t> pick_brand(truth.brand_probs.begin(), truth.brand_probs.end());
                session.actions.push_back(FacetFilter::categorical(pick_brand(rng)));
            }
            sessions.push_back(std::move(session));
        }
    }
    return sessions;
}

double measure_miss_rate(std::span<const Session> sessions, const Catalog& catalog)
{
    std::size_t total = 0;
    std::size_t missed = 0;
    for (const auto& session : sessions) {
        for (const auto& purchased : session.purchases) {
            const Item* item = catalog.find(purchased);
            if (item == nullptr) {
                continue;
            }
            for (const auto& action : session.actions) {
                if (!action.is_range()) {
                    continue;
                }
                ++total;
                if (!action.matches(*item)) {
                    ++missed;
                }
            }
        }
    }
    if (total == 0) {
        throw std::domain_error("no purchasing session with a price filter");
    }
    return static_cast<double>(missed) / static_cast<double>(total);
}

}  // namespace softfacet
