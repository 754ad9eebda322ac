#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "softfacet/facets.hpp"

namespace softfacet {

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
  public:
    DataError(const std::string& message, std::size_t line = 0);
    [[nodiscard]] std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

/// One logged search episode.
struct Session {
    std::string session_id;
    std::string query;
    std::vector<FacetFilter> actions;
    /// Usually zero or one item; several purchases are attributed independently.
    std::vector<ItemId> purchases;
};

struct LogRejects {
    /// (line, message) per action or record that was dropped while parsing.
    std::vector<std::pair<std::size_t, std::string>> entries;
};

/// Catalog JSON lines: {"id","title","brand","price"}. Brands are interned in
/// order of first appearance. Throws DataError with the offending line.
[[nodiscard]] Catalog read_catalog(std::istream& in);
[[nodiscard]] Catalog read_catalog_file(const std::string& path);
void write_catalog(std::ostream& out, const Catalog& catalog);

/// Session log JSON lines:
///   {"session_id","query","actions":[{"facet":"brand","value":"..."} |
///    {"facet":"price","lo":x|null,"hi":y|null}],"purchased":"id"|null}
/// Brand actions naming a brand absent from the catalog are dropped and
/// listed in `rejects`. Structural problems throw DataError.
[[nodiscard]] std::vector<Session> read_session_log(std::istream& in,
                                                    const BrandVocabulary& brands,
                                                    LogRejects* rejects = nullptr);
[[nodiscard]] std::vector<Session> read_session_log_file(const std::string& path,
                                                         const BrandVocabulary& brands,
                                                         LogRejects* rejects = nullptr);
void write_session_log(std::ostream& out, const std::vector<Session>& sessions, const BrandVocabulary& brands);

/// Wire form of a filter, shared by the log format and the HTTP API.
[[nodiscard]] nlohmann::json filter_to_json(const FacetFilter& filter, const BrandVocabulary& brands);
/// Throws std::invalid_argument on a malformed or unknown filter.
[[nodiscard]] FacetFilter filter_from_json(const nlohmann::json& doc, const BrandVocabulary& brands);

}  // namespace softfacet
