#pragma once

// JSON form of scenarios and builder parameters. Nodes and links are named
// ("S1", ["S1", "X"]); paths are node-name lists; times are integer ns.

#include <nlohmann/json.hpp>

#include "ttu/netsim/model.hpp"
#include "ttu/netsim/scenarios.hpp"

namespace ttu::netsim {

nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const UpdateStrategy& s);
UpdateStrategy strategy_from_json(const nlohmann::json& j, const std::string& where = "strategy");

nlohmann::json to_json(const FlowSwapParams& p);
FlowSwapParams flow_swap_params_from_json(const nlohmann::json& j, const std::string& where = "params");

nlohmann::json to_json(const MultiPhaseParams& p);
MultiPhaseParams multiphase_params_from_json(const nlohmann::json& j, const std::string& where = "params");

}  // namespace ttu::netsim
