#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "imdp/chain.hpp"
#include "imdp/params.hpp"
#include "imdp/planner.hpp"
#include "imdp/policy.hpp"

namespace imdp {

nlohmann::json params_to_json(const AlgoParams& params);
/// Overlays the keys present in `j` onto `base`; unknown keys throw.
AlgoParams params_from_json(const nlohmann::json& j, AlgoParams base = {});

/// {iteration, params, states: [{x, boundary, J, mu|null, dt, kappa}]}
nlohmann::json model_to_json(const DiscreteModel& model, const AlgoParams& params);
DiscreteModel model_from_json(const nlohmann::json& j, AlgoParams* params = nullptr);

std::string probe_label(const Vector& z);
/// {n, size, wall_ms, updated, sup_change, extended, probes: {label: J}};
/// wall_ms is left out unless `with_timing`.
nlohmann::json trace_to_json(const IterationTrace& trace, const std::vector<Vector>& probes, bool with_timing = true);

/// {trials, start, mean, std_error, exits: {goal, obstacle, outer, timeout},
///  costs: [...], exit_times: [...]}
nlohmann::json report_to_json(const RolloutReport& report, const Vector& start);

}  // namespace imdp
