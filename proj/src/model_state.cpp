#include "softfacet/model_state.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace softfacet {

nlohmann::json to_json(const ItemModelState& state)
{
    return {
        {"item_id", state.item_id},
        {"dirichlet", {{"alpha", state.dirichlet.alpha()}}},
        {"nig",
         {{"mu", state.nig.mu},
          {"kappa", state.nig.kappa},
          {"alpha", state.nig.alpha},
          {"beta", state.nig.beta}}},
    };
}

ItemModelState item_model_state_from_json(const nlohmann::json& doc)
{
    try {
        const auto& nig_doc = doc.at("nig");
        NIGState nig{nig_doc.at("mu").get<double>(),
                     nig_doc.at("kappa").get<double>(),
                     nig_doc.at("alpha").get<double>(),
                     nig_doc.at("beta").get<double>()};
        nig.validate();
        return ItemModelState{doc.at("item_id").get<std::string>(),
                              DirichletState(doc.at("dirichlet").at("alpha").get<std::vector<double>>()),
                              nig};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed model state: ") + e.what());
    }
}

}  // namespace softfacet
