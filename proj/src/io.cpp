#include "f1grasp/io.hpp"

#include <fstream>
#include <set>

namespace f1grasp {

using nlohmann::json;

namespace {

constexpr double kMm = 1e-3;

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) field_error(where + "." + key, "missing");
  if (!j[key].is_number()) field_error(where + "." + key, "expected a number");
  return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return number(j, key, where);
}

Polygon2 polygon_mm(const json& j, const std::string& where) {
  if (!j.is_array()) field_error(where, "expected an array of [x, z] pairs");
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      field_error(where + "[" + std::to_string(i) + "]", "expected [x, z]");
    v.push_back({p[0].get<double>() * kMm, p[1].get<double>() * kMm});
  }
  try {
    return Polygon2(std::move(v));
  } catch (const ValidationError& e) {
    field_error(where, e.what());
  }
}

json polygon_to_mm(const Polygon2& p) {
  json out = json::array();
  for (const Vec2& v : p.vertices()) out.push_back({v.x / kMm, v.z / kMm});
  return out;
}

void check_format(const json& j, const std::string& kind) {
  if (!j.contains("format")) field_error(kind, "missing format field");
  if (j["format"] != 1) field_error(kind + ".format", "unsupported version " + j["format"].dump());
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<SuiteObject> parse_object_suite(const json& j) {
  const json* list = &j;
  if (j.is_object()) {
    check_format(j, "suite");
    if (!j.contains("objects") || !j["objects"].is_array()) field_error("suite.objects", "expected an array");
    list = &j["objects"];
  } else if (!j.is_array()) {
    field_error("suite", "expected an object or an array");
  }
  std::vector<SuiteObject> out;
  std::set<std::string> names;
  std::set<int> ids;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& o = (*list)[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (!o.is_object()) field_error(where, "expected an object");
    SuiteObject so;
    so.id = o.contains("id") ? static_cast<int>(number(o, "id", where)) : static_cast<int>(i) + 1;
    if (!o.contains("name") || !o["name"].is_string()) field_error(where + ".name", "missing or not a string");
    so.model.name = o["name"].get<std::string>();
    if (!o.contains("vertices_mm")) field_error(where + ".vertices_mm", "missing");
    so.model.cross_section = polygon_mm(o["vertices_mm"], where + ".vertices_mm");
    so.model.mass = number(o, "mass_g", where) * 1e-3;
    so.model.mu_table = number_or(o, "mu_table", so.model.mu_table, where);
    so.model.mu_finger = number_or(o, "mu_finger", so.model.mu_finger, where);
    so.model.depth = number_or(o, "depth_mm", 0.0, where) * kMm;
    if (o.contains("provenance")) {
      if (!o["provenance"].is_string()) field_error(where + ".provenance", "expected a string");
      so.model.provenance = o["provenance"].get<std::string>();
    }
    try {
      so.model.validate();
    } catch (const ValidationError& e) {
      field_error(where, e.what());
    }
    if (!names.insert(so.model.name).second) field_error(where + ".name", "duplicate name " + so.model.name);
    if (!ids.insert(so.id).second) field_error(where + ".id", "duplicate id " + std::to_string(so.id));
    out.push_back(std::move(so));
  }
  return out;
}

std::vector<SuiteObject> load_object_suite(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return parse_object_suite(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json object_suite_to_json(const std::vector<SuiteObject>& suite) {
  json objects = json::array();
  for (const SuiteObject& so : suite) {
    json o{{"id", so.id},
           {"name", so.model.name},
           {"vertices_mm", polygon_to_mm(so.model.cross_section)},
           {"mass_g", so.model.mass * 1e3},
           {"mu_table", so.model.mu_table},
           {"mu_finger", so.model.mu_finger}};
    if (so.model.depth > 0.0) o["depth_mm"] = so.model.depth / kMm;
    if (!so.model.provenance.empty()) o["provenance"] = so.model.provenance;
    objects.push_back(std::move(o));
  }
  return {{"format", 1}, {"objects", objects}};
}

const SuiteObject& find_object(const std::vector<SuiteObject>& suite, const std::string& name_or_id) {
  for (const SuiteObject& so : suite) {
    if (so.model.name == name_or_id || std::to_string(so.id) == name_or_id) return so;
  }
  throw ValidationError("unknown object '" + name_or_id + "'");
}

HandConfig parse_hand_config(const json& j) {
  if (!j.is_object()) field_error("hand", "expected an object");
  check_format(j, "hand");
  if (!j.contains("variant") || !j["variant"].is_string()) field_error("hand.variant", "missing or not a string");
  HandConfig c = make_hand_config(hand_variant_from_string(j["variant"].get<std::string>()));
  const std::string w = "hand";
  c.max_aperture = number_or(j, "max_aperture_mm", c.max_aperture / kMm, w) * kMm;
  if (j.contains("fixed_finger_profile_mm"))
    c.fixed_finger_profile = polygon_mm(j["fixed_finger_profile_mm"], w + ".fixed_finger_profile_mm");
  if (j.contains("link_lengths_mm")) {
    const json& l = j["link_lengths_mm"];
    if (!l.is_array() || l.size() != 3) field_error(w + ".link_lengths_mm", "expected three lengths");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!l[i].is_number()) field_error(w + ".link_lengths_mm[" + std::to_string(i) + "]", "expected a number");
      c.linkage.link_lengths[i] = l[i].get<double>() * kMm;
    }
  }
  c.linkage.pip_spring_k = number_or(j, "pip_spring_k", c.linkage.pip_spring_k, w);
  c.linkage.stall_force = number_or(j, "stall_force_n", c.linkage.stall_force, w);
  c.slider.k_s = number_or(j, "slider_k", c.slider.k_s, w);
  c.slider.preload = number_or(j, "slider_preload_n", c.slider.preload, w);
  c.slider.max_stroke = number_or(j, "slider_stroke_mm", c.slider.max_stroke / kMm, w) * kMm;
  c.track_radius = number_or(j, "track_radius_mm", c.track_radius / kMm, w) * kMm;
  c.arc_bottom_aperture = number_or(j, "arc_bottom_aperture_mm", c.arc_bottom_aperture / kMm, w) * kMm;
  c.arc_bottom = number_or(j, "arc_bottom_mm", c.arc_bottom / kMm, w) * kMm;
  c.approach_compression = number_or(j, "approach_compression_mm", c.approach_compression / kMm, w) * kMm;
  c.baseline.tip_arc_radius = number_or(j, "baseline_arc_radius_mm", c.baseline.tip_arc_radius / kMm, w) * kMm;
  c.baseline.stall_force = number_or(j, "baseline_stall_force_n", c.baseline.stall_force, w);
  if (c.slider.k_s <= 0.0 || c.slider.preload < 0.0 || c.slider.max_stroke <= 0.0)
    field_error(w, "slider constants must be positive");
  if (c.is_baseline()) {
    c.baseline.max_aperture = c.max_aperture;
  } else {
    place_actuated_finger(c);
  }
  c.linkage.validate();
  return c;
}

HandConfig load_hand_config(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return parse_hand_config(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json hand_config_to_json(const HandConfig& c) {
  const auto& l = c.linkage.link_lengths;
  return {{"format", 1},
          {"variant", to_string(c.variant)},
          {"max_aperture_mm", c.max_aperture / kMm},
          {"fixed_finger_profile_mm", polygon_to_mm(c.fixed_finger_profile)},
          {"link_lengths_mm", {l[0] / kMm, l[1] / kMm, l[2] / kMm}},
          {"pip_spring_k", c.linkage.pip_spring_k},
          {"stall_force_n", c.linkage.stall_force},
          {"slider_k", c.slider.k_s},
          {"slider_preload_n", c.slider.preload},
          {"slider_stroke_mm", c.slider.max_stroke / kMm},
          {"track_radius_mm", c.track_radius / kMm},
          {"arc_bottom_aperture_mm", c.arc_bottom_aperture / kMm},
          {"arc_bottom_mm", c.arc_bottom / kMm},
          {"approach_compression_mm", c.approach_compression / kMm},
          {"baseline_arc_radius_mm", c.baseline.tip_arc_radius / kMm},
          {"baseline_stall_force_n", c.baseline.stall_force}};
}

}  // namespace f1grasp
