#include "softfacet/session_log.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace softfacet {

using nlohmann::json;

namespace {

double bound_from_json(const json& doc, const char* key, double open_value)
{
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return open_value;
    }
    if (!doc.at(key).is_number()) {
        throw std::invalid_argument(std::string("price bound '") + key + "' must be a number or null");
    }
    return doc.at(key).get<double>();
}

json bound_to_json(double value)
{
    return std::isinf(value) ? json(nullptr) : json(value);
}

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return in;
}

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

DataError::DataError(const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      m_line(line)
{}

json filter_to_json(const FacetFilter& filter, const BrandVocabulary& brands)
{
    if (filter.is_categorical()) {
        return {{"facet", "brand"}, {"value", brands.name(filter.as_categorical().brand_index)}};
    }
    const auto& r = filter.as_range();
    return {{"facet", "price"}, {"lo", bound_to_json(r.lo)}, {"hi", bound_to_json(r.hi)}};
}

FacetFilter filter_from_json(const json& doc, const BrandVocabulary& brands)
{
    if (!doc.is_object() || !doc.contains("facet") || !doc.at("facet").is_string()) {
        throw std::invalid_argument("filter needs a string 'facet' field");
    }
    const auto facet = doc.at("facet").get<std::string>();
    if (facet == "brand") {
        if (!doc.contains("value") || !doc.at("value").is_string()) {
            throw std::invalid_argument("brand filter needs a string 'value'");
        }
        const auto name = doc.at("value").get<std::string>();
        const auto index = brands.find(name);
        if (!index) {
            throw std::invalid_argument("unknown brand: " + name);
        }
        return FacetFilter::categorical(*index);
    }
    if (facet == "price") {
        return FacetFilter::range(bound_from_json(doc, "lo", -kInfinity), bound_from_json(doc, "hi", kInfinity));
    }
    throw std::invalid_argument("unknown facet: " + facet);
}

Catalog read_catalog(std::istream& in)
{
    Catalog catalog;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        try {
            const auto doc = json::parse(line);
            Item item;
            item.id = doc.at("id").get<std::string>();
            item.title = doc.value("title", std::string{});
            item.price = doc.at("price").get<double>();
            item.brand_index = catalog.brands().intern(doc.at("brand").get<std::string>());
            catalog.add(std::move(item));
        } catch (const json::exception& e) {
            throw DataError(e.what(), line_no);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), line_no);
        }
    }
    if (catalog.size() == 0) {
        throw DataError("catalog is empty");
    }
    return catalog;
}

Catalog read_catalog_file(const std::string& path)
{
    auto in = open_input(path);
    try {
        return read_catalog(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_catalog(std::ostream& out, const Catalog& catalog)
{
    for (const auto& item : catalog.items()) {
        out << json{{"id", item.id},
                    {"title", item.title},
                    {"brand", catalog.brands().name(item.brand_index)},
                    {"price", item.price}}
                   .dump()
            << '\n';
    }
}

std::vector<Session> read_session_log(std::istream& in, const BrandVocabulary& brands, LogRejects* rejects)
{
    std::vector<Session> sessions;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        try {
            const auto doc = json::parse(line);
            Session s;
            s.session_id = doc.at("session_id").get<std::string>();
            s.query = doc.at("query").get<std::string>();
            for (const auto& action : doc.value("actions", json::array())) {
                try {
                    s.actions.push_back(filter_from_json(action, brands));
                } catch (const std::invalid_argument& e) {
                    if (action.value("facet", "") != "brand" || !action.contains("value")) {
                        throw;
                    }
                    if (rejects != nullptr) {
                        rejects->entries.emplace_back(line_no, e.what());
                    }
                }
            }
            if (doc.contains("purchased")) {
                const auto& p = doc.at("purchased");
                if (p.is_string()) {
                    s.purchases.push_back(p.get<std::string>());
                } else if (p.is_array()) {
                    s.purchases = p.get<std::vector<std::string>>();
                } else if (!p.is_null()) {
                    throw std::invalid_argument("'purchased' must be an item id, a list of ids, or null");
                }
            }
            sessions.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw DataError(e.what(), line_no);
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), line_no);
        }
    }
    return sessions;
}

std::vector<Session> read_session_log_file(const std::string& path,
                                           const BrandVocabulary& brands,
                                           LogRejects* rejects)
{
    auto in = open_input(path);
    try {
        return read_session_log(in, brands, rejects);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void write_session_log(std::ostream& out, const std::vector<Session>& sessions, const BrandVocabulary& brands)
{
    for (const auto& s : sessions) {
        json actions = json::array();
        for (const auto& a : s.actions) {
            actions.push_back(filter_to_json(a, brands));
        }
        json purchased = nullptr;
        if (s.purchases.size() == 1) {
            purchased = s.purchases.front();
        } else if (s.purchases.size() > 1) {
            purchased = s.purchases;
        }
        out << json{{"session_id", s.session_id},
                    {"query", s.query},
                    {"actions", std::move(actions)},
                    {"purchased", std::move(purchased)}}
                   .dump()
            << '\n';
    }
}

}  // namespace softfacet
