#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "softfacet/reranker.hpp"
#include "softfacet/training.hpp"

namespace httplib {
class Server;
}

namespace softfacet {

/// Relevance scores per query, used as the prior of a browsing session.
using RelevanceTable = std::map<std::string, std::vector<std::pair<ItemId, double>>>;

/// JSON lines: {"query": "...", "scores": {"item_id": score, ...}}.
[[nodiscard]] RelevanceTable read_relevance_file(const std::string& path);
void write_relevance(std::ostream& out, const RelevanceTable& table);

struct ServiceConfig {
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    std::string model_path;
    std::string catalog_path;
    /// Optional; queries without scores fall back to a uniform prior.
    std::string relevance_path;
    std::string catalog_name = "default";
    std::size_t page_size = 20;
    RankMode default_mode = RankMode::soft;
    std::chrono::seconds session_ttl{30 * 60};
    double price_bucket_width = 50.0;

    /// Relative paths resolve against `base_dir`. Throws DataError when a
    /// referenced file does not exist or a value is invalid.
    static ServiceConfig from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
    static ServiceConfig load(const std::string& path);
};

/// JSON API over in-memory browsing sessions. Handlers are transport-free so
/// they can be driven directly; `bind` mounts them on an HTTP server under /v1.
class BrowseService {
  public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    struct Response {
        int status = 200;
        nlohmann::json body;
    };

    BrowseService(Catalog catalog, TrainedModel model, RelevanceTable relevance, ServiceConfig config, Clock clock = {});

    BrowseService(const BrowseService&) = delete;
    BrowseService& operator=(const BrowseService&) = delete;

    /// POST /v1/sessions {"query", "catalog"?}
    Response create_session(const std::string& body);
    /// POST /v1/sessions/{id}/filters {facet filter fields, "mode"?}
    Response add_filter(const std::string& session_id, const std::string& body);
    /// DELETE /v1/sessions/{id}/filters/last[?mode=]
    Response remove_last_filter(const std::string& session_id, std::optional<std::string> mode = std::nullopt);
    /// GET /v1/sessions/{id}
    Response get_session(const std::string& session_id);
    /// GET /v1/facets
    Response facets() const;

    void bind(httplib::Server& server);

    [[nodiscard]] std::size_t session_count() const;
    /// Drops sessions idle for longer than the configured TTL.
    void evict_expired();

  private:
    struct SessionSlot {
        explicit SessionSlot(BrowseSession s) : session(std::move(s)) {}

        std::mutex mutex;
        BrowseSession session;
        RankMode mode = RankMode::soft;
        bool untrained = false;
        std::chrono::steady_clock::time_point last_access;
    };

    std::shared_ptr<SessionSlot> find_slot(const std::string& session_id);
    /// Replays `filters` in `mode`; a hard filter set that matches nothing yields an empty page.
    void recompute(SessionSlot& slot, std::vector<FacetFilter> filters, RankMode mode) const;
    [[nodiscard]] nlohmann::json page(const SessionSlot& slot) const;
    [[nodiscard]] PriorPropensity prior_for(const std::string& query) const;

    Catalog m_catalog;
    TrainedModel m_model;
    RelevanceTable m_relevance;
    ServiceConfig m_config;
    Clock m_clock;

    mutable std::mutex m_sessions_mutex;
    std::map<std::string, std::shared_ptr<SessionSlot>> m_sessions;
    std::size_t m_next_session = 1;
};

[[nodiscard]] nlohmann::json error_body(const std::string& code, const std::string& message);

}  // namespace softfacet
