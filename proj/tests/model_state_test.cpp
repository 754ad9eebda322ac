#include "softfacet/model_state.hpp"

#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace softfacet {
namespace {

TEST(ModelStateJson, RoundTripsExactly)
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(1e-4, 1e4);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> alpha(1 + rng() % 10);
        for (auto& a : alpha) {
            a = u(rng);
        }
        const ItemModelState state{"item-" + std::to_string(i), DirichletState(alpha),
                                   NIGState{u(rng) - 5000, u(rng), u(rng), u(rng)}};
        const auto text = to_json(state).dump();
        EXPECT_EQ(item_model_state_from_json(nlohmann::json::parse(text)), state);
    }
}

TEST(ModelStateJson, Layout)
{
    const ItemModelState state{"E", DirichletState({1.1, 0.1}), NIGState{12, 3, 2, 5}};
    const auto doc = to_json(state);
    EXPECT_EQ(doc.at("item_id"), "E");
    EXPECT_EQ(doc.at("dirichlet").at("alpha"), nlohmann::json::array({1.1, 0.1}));
    EXPECT_EQ(doc.at("nig").at("kappa"), 3.0);
}

TEST(ModelStateJson, RejectsMalformedDocuments)
{
    auto doc = to_json(ItemModelState{"E", DirichletState({1.0}), NIGState{12, 3, 2, 5}});
    auto missing = doc;
    missing.erase("nig");
    EXPECT_THROW((void)item_model_state_from_json(missing), std::invalid_argument);
    auto negative = doc;
    negative["nig"]["beta"] = -1.0;
    EXPECT_THROW((void)item_model_state_from_json(negative), std::invalid_argument);
    auto empty_alpha = doc;
    empty_alpha["dirichlet"]["alpha"] = nlohmann::json::array();
    EXPECT_THROW((void)item_model_state_from_json(empty_alpha), std::invalid_argument);
    EXPECT_THROW((void)item_model_state_from_json(nlohmann::json("text")), std::invalid_argument);
}

}  // namespace
}  // namespace softfacet
