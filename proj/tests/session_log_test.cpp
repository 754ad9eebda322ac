#include "softfacet/session_log.hpp"

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace softfacet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::string kFixtures = SOFTFACET_FIXTURES;

TEST(ReadCatalog, InternsBrandsInFirstAppearanceOrder)
{
    const auto catalog = read_catalog_file(kFixtures + "/catalog.jsonl");
    ASSERT_EQ(catalog.size(), 4u);
    EXPECT_EQ(catalog.brands().names(), (std::vector<std::string>{"acme", "bolt", "corvo"}));
    EXPECT_EQ(catalog.at("G").brand_index, 2u);
    EXPECT_DOUBLE_EQ(catalog.at("G").price, 25.5);
    EXPECT_EQ(catalog.at("E").title, "Compact kettle");
}

TEST(ReadCatalog, ReportsLineNumbers)
{
    std::istringstream in("{\"id\":\"a\",\"title\":\"t\",\"brand\":\"x\",\"price\":1}\n\n{\"id\":\"b\",\"brand\":\"x\"}\n");
    try {
        (void)read_catalog(in);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(ReadCatalog, RejectsDuplicatesAndBadPrices)
{
    std::istringstream dup("{\"id\":\"a\",\"title\":\"t\",\"brand\":\"x\",\"price\":1}\n"
                           "{\"id\":\"a\",\"title\":\"t\",\"brand\":\"x\",\"price\":2}\n");
    EXPECT_THROW((void)read_catalog(dup), DataError);
    std::istringstream negative("{\"id\":\"a\",\"title\":\"t\",\"brand\":\"x\",\"price\":-1}\n");
    EXPECT_THROW((void)read_catalog(negative), DataError);
    std::istringstream empty("");
    EXPECT_THROW((void)read_catalog(empty), DataError);
}

TEST(CatalogIo, RoundTrips)
{
    const auto catalog = read_catalog_file(kFixtures + "/catalog.jsonl");
    std::stringstream buffer;
    write_catalog(buffer, catalog);
    const auto again = read_catalog(buffer);
    EXPECT_EQ(again.brands().names(), catalog.brands().names());
    ASSERT_EQ(again.size(), catalog.size());
    for (const auto& item : catalog.items()) {
        EXPECT_EQ(again.at(item.id).price, item.price);
        EXPECT_EQ(again.at(item.id).brand_index, item.brand_index);
        EXPECT_EQ(again.at(item.id).title, item.title);
    }
}

TEST(ReadSessionLog, ParsesFixtureAndRecordsUnknownBrands)
{
    const auto catalog = read_catalog_file(kFixtures + "/catalog.jsonl");
    LogRejects rejects;
    const auto sessions = read_session_log_file(kFixtures + "/sessions.jsonl", catalog.brands(), &rejects);
    ASSERT_EQ(sessions.size(), 4u);
    EXPECT_EQ(sessions[0].actions,
              (std::vector<FacetFilter>{FacetFilter::range(5, 15), FacetFilter::categorical(0)}));
    EXPECT_EQ(sessions[0].purchases, (std::vector<ItemId>{"E"}));
    EXPECT_EQ(sessions[1].actions, (std::vector<FacetFilter>{FacetFilter::range(12, 16)}));
    EXPECT_TRUE(sessions[2].purchases.empty());
    EXPECT_TRUE(sessions[3].actions.empty());
    ASSERT_EQ(rejects.entries.size(), 1u);
    EXPECT_EQ(rejects.entries[0].first, 2u);
}

TEST(ReadSessionLog, AcceptsPurchaseListsAndOpenRanges)
{
    const BrandVocabulary brands({"acme"});
    std::istringstream in(R"({"session_id":"a","query":"q","actions":[{"facet":"price","lo":200,"hi":null}],"purchased":["x","y"]})"
                          "\n"
                          R"({"session_id":"b","query":"q","actions":[{"facet":"price","lo":null,"hi":50}]})"
                          "\n");
    const auto sessions = read_session_log(in, brands);
    ASSERT_EQ(sessions.size(), 2u);
    EXPECT_EQ(sessions[0].actions[0], FacetFilter::range(200, kInf));
    EXPECT_EQ(sessions[0].purchases, (std::vector<ItemId>{"x", "y"}));
    EXPECT_EQ(sessions[1].actions[0], FacetFilter::range(-kInf, 50));
    EXPECT_TRUE(sessions[1].purchases.empty());
}

TEST(ReadSessionLog, RejectsMalformedLines)
{
    const BrandVocabulary brands({"acme"});
    for (const std::string bad : {
             R"({"query":"q","actions":[]})",
             R"({"session_id":"a","query":"q","actions":[{"facet":"color","value":"red"}]})",
             R"({"session_id":"a","query":"q","actions":[{"facet":"price","lo":9,"hi":3}]})",
             R"({"session_id":"a","query":"q","actions":[],"purchased":7})",
             "not json",
         }) {
        std::istringstream in(bad + "\n");
        EXPECT_THROW((void)read_session_log(in, brands), DataError) << bad;
    }
}

TEST(SessionLogIo, RoundTrips)
{
    const auto catalog = read_catalog_file(kFixtures + "/catalog.jsonl");
    std::vector<Session> sessions{
        {"a", "kettle", {FacetFilter::categorical(2), FacetFilter::range(200, kInf)}, {"E", "F"}},
        {"b", "teapot", {FacetFilter::range(-kInf, 50)}, {}},
    };
    std::stringstream buffer;
    write_session_log(buffer, sessions, catalog.brands());
    const auto again = read_session_log(buffer, catalog.brands());
    ASSERT_EQ(again.size(), 2u);
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        EXPECT_EQ(again[i].session_id, sessions[i].session_id);
        EXPECT_EQ(again[i].query, sessions[i].query);
        EXPECT_EQ(again[i].actions, sessions[i].actions);
        EXPECT_EQ(again[i].purchases, sessions[i].purchases);
    }
}

TEST(FilterJson, Layout)
{
    const BrandVocabulary brands({"acme", "bolt"});
    EXPECT_EQ(filter_to_json(FacetFilter::categorical(1), brands),
              (nlohmann::json{{"facet", "brand"}, {"value", "bolt"}}));
    const auto open = filter_to_json(FacetFilter::range(-kInf, 50), brands);
    EXPECT_TRUE(open.at("lo").is_null());
    EXPECT_EQ(open.at("hi"), 50.0);
    EXPECT_THROW((void)filter_from_json(nlohmann::json{{"facet", "brand"}, {"value", "zed"}}, brands),
                 std::invalid_argument);
}

}  // namespace
}  // namespace softfacet
