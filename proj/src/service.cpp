#include "softfacet/service.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <httplib.h>

namespace softfacet {

using nlohmann::json;

namespace {

BrowseService::Response error_response(int status, const std::string& code, const std::string& message)
{
    return {status, error_body(code, message)};
}

std::string resolve(const std::string& base_dir, const std::string& path)
{
    if (path.empty()) {
        return path;
    }
    std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base_dir) / p).string();
}

std::optional<json> parse_body(const std::string& body)
{
    if (body.empty()) {
        return json::object();
    }
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        return std::nullopt;
    }
    return doc;
}

bool same_facet(const FacetFilter& a, const FacetFilter& b)
{
    return a.is_categorical() == b.is_categorical();
}

}  // namespace

json error_body(const std::string& code, const std::string& message)
{
    return {{"error", {{"code", code}, {"message", message}}}};
}

RelevanceTable read_relevance_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    RelevanceTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto doc = json::parse(line);
            auto& scores = table[doc.at("query").get<std::string>()];
            for (const auto& [id, score] : doc.at("scores").items()) {
                scores.emplace_back(id, score.get<double>());
            }
        } catch (const json::exception& e) {
            throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

void write_relevance(std::ostream& out, const RelevanceTable& table)
{
    for (const auto& [query, scores] : table) {
        json doc = {{"query", query}, {"scores", json::object()}};
        for (const auto& [id, score] : scores) {
            doc["scores"][id] = score;
        }
        out << doc.dump() << '\n';
    }
}

ServiceConfig ServiceConfig::from_json(const json& doc, const std::string& base_dir)
{
    ServiceConfig c;
    try {
        if (doc.contains("listen")) {
            const auto listen = doc.at("listen").get<std::string>();
            const auto colon = listen.rfind(':');
            if (colon == std::string::npos) {
                throw DataError("listen must look like host:port");
            }
            c.listen_host = listen.substr(0, colon);
            c.listen_port = std::stoi(listen.substr(colon + 1));
        }
        c.model_path = resolve(base_dir, doc.at("model").get<std::string>());
        c.catalog_path = resolve(base_dir, doc.at("catalog").get<std::string>());
        c.relevance_path = resolve(base_dir, doc.value("relevance", std::string{}));
        c.catalog_name = doc.value("catalog_name", c.catalog_name);
        c.page_size = doc.value("page_size", c.page_size);
        c.default_mode = parse_rank_mode(doc.value("default_mode", std::string("soft")));
        c.session_ttl = std::chrono::seconds(doc.value("session_ttl_seconds", 30 * 60));
        c.price_bucket_width = doc.value("price_bucket_width", c.price_bucket_width);
    } catch (const json::exception& e) {
        throw DataError(std::string("service config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("service config: ") + e.what());
    }
    if (c.page_size < 1) {
        throw DataError("service config: page_size must be at least 1");
    }
    if (!(c.price_bucket_width > 0.0)) {
        throw DataError("service config: price_bucket_width must be positive");
    }
    for (const auto* path : {&c.model_path, &c.catalog_path, &c.relevance_path}) {
        if (!path->empty() && !std::filesystem::exists(*path)) {
            throw DataError("service config: " + *path + " does not exist");
        }
    }
    return c;
}

ServiceConfig ServiceConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return from_json(doc, std::filesystem::path(path).parent_path().string());
}

BrowseService::BrowseService(
    Catalog catalog, TrainedModel model, RelevanceTable relevance, ServiceConfig config, Clock clock)
    : m_catalog(std::move(catalog)),
      m_model(std::move(model)),
      m_relevance(std::move(relevance)),
      m_config(std::move(config)),
      m_clock(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); }))
{
    if (m_model.brands().names() != m_catalog.brands().names()) {
        throw DataError("model brand vocabulary does not match the catalog");
    }
}

PriorPropensity BrowseService::prior_for(const std::string& query) const
{
    if (auto it = m_relevance.find(query); it != m_relevance.end()) {
        std::vector<std::pair<ItemId, double>> known;
        for (const auto& score : it->second) {
            if (m_catalog.find(score.first) != nullptr) {
                known.push_back(score);
            }
        }
        if (!known.empty()) {
            return normalize_prior(known);
        }
    }
    std::vector<std::pair<ItemId, double>> uniform;
    uniform.reserve(m_catalog.size());
    for (const auto& item : m_catalog.items()) {
        uniform.emplace_back(item.id, 1.0);
    }
    return normalize_prior(uniform);
}

json BrowseService::page(const SessionSlot& slot) const
{
    const auto& s = slot.session;
    json filters = json::array();
    for (const auto& f : s.applied_filters) {
        filters.push_back(filter_to_json(f, m_catalog.brands()));
    }
    json results = json::array();
    const std::size_t shown = std::min(m_config.page_size, s.ranked.size());
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& entry = s.ranked[i];
        const Item& item = m_catalog.at(entry.item_id);
        results.push_back({
            {"item_id", item.id},
            {"title", item.title},
            {"brand", m_catalog.brands().name(item.brand_index)},
            {"price", item.price},
            {"score", entry.score},
            {"within_filter", entry.within_filter},
        });
    }
    return {
        {"session_id", s.session_id},
        {"query", s.query},
        {"mode", to_string(slot.mode)},
        {"untrained", slot.untrained},
        {"filters", std::move(filters)},
        {"total", s.ranked.size()},
        {"page_size", m_config.page_size},
        {"results", std::move(results)},
    };
}

void BrowseService::recompute(SessionSlot& slot, std::vector<FacetFilter> filters, RankMode mode) const
{
    const auto likelihood = m_model.likelihood(slot.session.query);
    try {
        slot.session = replay_filters(slot.session, filters, m_catalog, likelihood, mode);
    } catch (const EmptyPosteriorError&) {
        if (mode != RankMode::hard) {
            throw;
        }
        auto empty = BrowseSession::start(slot.session.session_id, slot.session.query, slot.session.base_propensity);
        empty.applied_filters = std::move(filters);
        empty.ranked.clear();
        slot.session = std::move(empty);
    }
    slot.mode = mode;
}

std::shared_ptr<BrowseService::SessionSlot> BrowseService::find_slot(const std::string& session_id)
{
    evict_expired();
    std::lock_guard lock(m_sessions_mutex);
    auto it = m_sessions.find(session_id);
    if (it == m_sessions.end()) {
        return nullptr;
    }
    return it->second;
}

void BrowseService::evict_expired()
{
    const auto now = m_clock();
    std::lock_guard lock(m_sessions_mutex);
    for (auto it = m_sessions.begin(); it != m_sessions.end();) {
        std::unique_lock slot_lock(it->second->mutex, std::try_to_lock);
        if (slot_lock.owns_lock() && now - it->second->last_access > m_config.session_ttl) {
            slot_lock.unlock();
            it = m_sessions.erase(it);
        } else {
            ++it;
        }
    }
}

std::size_t BrowseService::session_count() const
{
    std::lock_guard lock(m_sessions_mutex);
    return m_sessions.size();
}

BrowseService::Response BrowseService::create_session(const std::string& body)
{
    const auto doc = parse_body(body);
    if (!doc) {
        return error_response(400, "bad_request", "request body must be a JSON object");
    }
    if (!doc->contains("query") || !doc->at("query").is_string() || doc->at("query").get<std::string>().empty()) {
        return error_response(400, "bad_request", "query must be a non-empty string");
    }
    if (doc->contains("catalog") && doc->at("catalog") != m_config.catalog_name) {
        return error_response(404, "unknown_catalog", "no catalog named " + doc->at("catalog").dump());
    }
    const auto query = doc->at("query").get<std::string>();

    evict_expired();
    std::string id;
    {
        std::lock_guard lock(m_sessions_mutex);
        id = "sess-" + std::to_string(m_next_session++);
    }
    auto slot = std::make_shared<SessionSlot>(BrowseSession::start(id, query, prior_for(query)));
    slot->mode = m_config.default_mode;
    slot->untrained = !m_model.has_query(query);
    slot->last_access = m_clock();
    auto body_out = page(*slot);
    {
        std::lock_guard lock(m_sessions_mutex);
        m_sessions.emplace(id, slot);
    }
    return {slot->untrained ? 200 : 201, std::move(body_out)};
}

BrowseService::Response BrowseService::add_filter(const std::string& session_id, const std::string& body)
{
    auto slot = find_slot(session_id);
    if (!slot) {
        return error_response(404, "unknown_session", "no session " + session_id);
    }
    const auto doc = parse_body(body);
    if (!doc) {
        return error_response(422, "malformed_filter", "request body must be a JSON object");
    }
    FacetFilter filter = FacetFilter::categorical(0);
    std::optional<RankMode> mode;
    try {
        filter = filter_from_json(*doc, m_catalog.brands());
        if (doc->contains("mode")) {
            mode = parse_rank_mode(doc->at("mode").get<std::string>());
        }
    } catch (const std::exception& e) {
        return error_response(422, "malformed_filter", e.what());
    }

    std::lock_guard lock(slot->mutex);
    slot->last_access = m_clock();
    // One value per facet: a different value replaces the facet's current
    // filter, while re-posting the same value stacks it as repeated evidence.
    std::vector<FacetFilter> filters;
    for (const auto& existing : slot->session.applied_filters) {
        if (!same_facet(existing, filter) || existing == filter) {
            filters.push_back(existing);
        }
    }
    filters.push_back(filter);
    try {
        recompute(*slot, std::move(filters), mode.value_or(slot->mode));
    } catch (const EmptyPosteriorError& e) {
        return error_response(422, "empty_posterior", e.what());
    }
    return {200, page(*slot)};
}

BrowseService::Response BrowseService::remove_last_filter(const std::string& session_id, std::optional<std::string> mode_text)
{
    auto slot = find_slot(session_id);
    if (!slot) {
        return error_response(404, "unknown_session", "no session " + session_id);
    }
    std::optional<RankMode> mode;
    if (mode_text) {
        try {
            mode = parse_rank_mode(*mode_text);
        } catch (const std::invalid_argument& e) {
            return error_response(422, "bad_mode", e.what());
        }
    }
    std::lock_guard lock(slot->mutex);
    slot->last_access = m_clock();
    if (slot->session.applied_filters.empty()) {
        return error_response(409, "no_filters", "session has no applied filters");
    }
    auto filters = slot->session.applied_filters;
    filters.pop_back();
    try {
        recompute(*slot, std::move(filters), mode.value_or(slot->mode));
    } catch (const EmptyPosteriorError& e) {
        return error_response(422, "empty_posterior", e.what());
    }
    return {200, page(*slot)};
}

BrowseService::Response BrowseService::get_session(const std::string& session_id)
{
    auto slot = find_slot(session_id);
    if (!slot) {
        return error_response(404, "unknown_session", "no session " + session_id);
    }
    std::lock_guard lock(slot->mutex);
    slot->last_access = m_clock();
    return {200, page(*slot)};
}

BrowseService::Response BrowseService::facets() const
{
    double max_price = 0.0;
    for (const auto& item : m_catalog.items()) {
        max_price = std::max(max_price, item.price);
    }
    json buckets = json::array();
    const double width = m_config.price_bucket_width;
    const auto n_buckets = static_cast<std::size_t>(std::floor(max_price / width)) + 1;
    for (std::size_t b = 0; b < n_buckets; ++b) {
        buckets.push_back({{"facet", "price"}, {"lo", b * width}, {"hi", (b + 1) * width}});
    }
    return {200,
            {{"catalog", m_config.catalog_name},
             {"brands", m_catalog.brands().names()},
             {"price_buckets", std::move(buckets)},
             {"default_mode", to_string(m_config.default_mode)},
             {"page_size", m_config.page_size}}};
}

void BrowseService::bind(httplib::Server& server)
{
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Post("/v1/sessions", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, create_session(req.body));
    });
    server.Get(R"(/v1/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, get_session(req.matches[1]));
    });
    server.Post(R"(/v1/sessions/([^/]+)/filters)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, add_filter(req.matches[1], req.body));
    });
    server.Delete(R"(/v1/sessions/([^/]+)/filters/last)",
                  [this, reply](const httplib::Request& req, httplib::Response& res) {
                      std::optional<std::string> mode;
                      if (req.has_param("mode")) {
                          mode = req.get_param_value("mode");
                      }
                      reply(res, remove_last_filter(req.matches[1], mode));
                  });
    server.Get("/v1/facets", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, facets()); });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(error_body("not_found", "no such endpoint").dump(), "application/json");
        }
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(error_body("internal", message).dump(), "application/json");
    });
}

}  // namespace softfacet
