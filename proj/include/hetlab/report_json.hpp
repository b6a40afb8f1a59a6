#pragma once

// JSON forms of the analysis and experiment reports.

#include <string>

#include "hetlab/analysis.hpp"
#include "hetlab/experiments.hpp"
#include "json.hpp"

namespace hetlab {

using Json = nlohmann::ordered_json;

// Array of {"id", "lhs", "rhs", "sense", "pass"}; hypothesis rows add
// "status" and "evidence".
Json to_json(const ConditionReport& r);
Json to_json(const ConstructionReport& r);
Json to_json(const ConnectionRecord& r, bool include_path = false);
Json to_json(const ClassifyConfig& cfg);
Json to_json(const BasinReport& r);
Json to_json(const IndexEstimate& r);
Json to_json(const AdjudicationReport& r);
Json to_json(const SearchFailure& f);
Json to_json(const StateVector& x);

// {"manifest": manifest, "payload": payload}
Json envelope(Json manifest, Json payload);

}  // namespace hetlab
