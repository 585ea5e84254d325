#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "f1grasp/hand.hpp"
#include "f1grasp/sim.hpp"

namespace f1grasp {

struct SuiteObject {
  int id = 0;
  ObjectModel model;
};

/// Object suite: {"format": 1, "objects": [{id, name, vertices_mm, mass_g, mu_table, mu_finger, ...}]}.
/// A bare array of objects is accepted as well.
std::vector<SuiteObject> parse_object_suite(const nlohmann::json& j);
std::vector<SuiteObject> load_object_suite(const std::string& path);
nlohmann::json object_suite_to_json(const std::vector<SuiteObject>& suite);

const SuiteObject& find_object(const std::vector<SuiteObject>& suite, const std::string& name_or_id);

/// Hand file: {"format": 1, "variant": ..., optional overrides in mm / N / N/m}.
HandConfig parse_hand_config(const nlohmann::json& j);
HandConfig load_hand_config(const std::string& path);
nlohmann::json hand_config_to_json(const HandConfig& config);

nlohmann::json read_json_file(const std::string& path);

}  // namespace f1grasp
