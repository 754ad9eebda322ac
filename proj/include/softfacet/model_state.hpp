#pragma once

#include <nlohmann/json_fwd.hpp>

#include "softfacet/dirichlet.hpp"
#include "softfacet/nig.hpp"

namespace softfacet {

/// Both action models for one (query, item) pair.
struct ItemModelState {
    ItemId item_id;
    DirichletState dirichlet;
    NIGState nig;

    friend bool operator==(const ItemModelState&, const ItemModelState&) = default;
};

/// {"item_id", "dirichlet": {"alpha": [...]}, "nig": {"mu", "kappa", "alpha", "beta"}}
[[nodiscard]] nlohmann::json to_json(const ItemModelState& state);

/// Throws std::invalid_argument on a missing field or an invalid state.
[[nodiscard]] ItemModelState item_model_state_from_json(const nlohmann::json& doc);

}  // namespace softfacet
