#pragma once

#include <json.hpp>

#include "shorteq/channel.hpp"
#include "shorteq/classic_eq.hpp"
#include "shorteq/error_model.hpp"
#include "shorteq/fir_design.hpp"
#include "shorteq/sequence.hpp"

namespace shorteq {

using json = nlohmann::json;

/// {"start": int, "re": [...], "im": [...]}.
json to_json(const Sequence& s);
/// Accepts the object form above or a bare array of real taps starting at 0.
Sequence sequence_from_json(const json& j);

json to_json(const DesignResult& d);
json to_json(const FirSolution& s);
json to_json(const ErrorModel& m);
json to_json(const DominantError& d);

}  // namespace shorteq
