#include "f1grasp/estimator.hpp"

#include <algorithm>
#include <random>

#include "f1grasp/io.hpp"

namespace f1grasp {

using nlohmann::json;

void EstimatorConfig::validate() const {
  if (!(clearance >= 0.0)) throw ValidationError("estimator: clearance must be non-negative");
  if (!(noise_sigma_center >= 0.0) || !(noise_sigma_width >= 0.0) || !(noise_sigma_angle >= 0.0))
    throw ValidationError("estimator: noise sigmas must be non-negative");
  if (!(max_aperture > 0.0) || !(min_width > 0.0)) throw ValidationError("estimator: widths must be positive");
}

GraspPose oracle_estimate(const ObjectModel& object, const Transform2& pose, const EstimatorConfig& config) {
  config.validate();
  const Polygon2 poly = transform_apply(pose, object.cross_section);
  const double extent = poly.max_x() - poly.min_x();
  GraspPose g;
  g.center = {poly.centroid().x, poly.min_z()};
  g.angle = 0.0;
  if (extent > config.max_aperture) {
    g.width = config.max_aperture;
    g.quality = 0.0;
    return g;
  }
  g.width = std::min(extent + config.clearance, config.max_aperture);
  g.quality = 1.0;
  return g;
}

GraspPose noisy_estimate(const ObjectModel& object, const Transform2& pose, const EstimatorConfig& config) {
  GraspPose g = oracle_estimate(object, pose, config);
  if (g.quality == 0.0) return g;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double n_center = normal(rng);
  const double n_width = normal(rng);
  const double n_angle = normal(rng);
  g.center.x += config.noise_sigma_center * n_center;
  g.width = std::clamp(g.width + config.noise_sigma_width * n_width, config.min_width, config.max_aperture);
  g.angle += config.noise_sigma_angle * n_angle;
  return g;
}

std::vector<GraspPose> parse_external_poses(const json& j) {
  if (!j.is_object()) throw ValidationError("poses: expected an object");
  if (!j.contains("format") || j["format"] != 1) throw ValidationError("poses.format: expected 1");
  if (!j.contains("poses") || !j["poses"].is_array()) throw ValidationError("poses.poses: expected an array");
  std::vector<GraspPose> out;
  const json& list = j["poses"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "poses[" + std::to_string(i) + "]";
    const json& p = list[i];
    const auto num = [&](const json& v, const std::string& field) {
      if (!v.is_number()) throw ValidationError(where + "." + field + ": expected a number");
      return v.get<double>();
    };
    if (!p.is_object()) throw ValidationError(where + ": expected an object");
    for (const char* key : {"center_mm", "width_mm", "angle_deg", "quality"}) {
      if (!p.contains(key)) throw ValidationError(where + "." + key + ": missing");
    }
    const json& c = p["center_mm"];
    if (!c.is_array() || c.size() != 2) throw ValidationError(where + ".center_mm: expected [x, z]");
    GraspPose g;
    g.center = {num(c[0], "center_mm[0]") * 1e-3, num(c[1], "center_mm[1]") * 1e-3};
    g.width = num(p["width_mm"], "width_mm") * 1e-3;
    g.angle = num(p["angle_deg"], "angle_deg") * kPi / 180.0;
    g.quality = num(p["quality"], "quality");
    if (g.width < 0.0) throw ValidationError(where + ".width_mm: must be non-negative");
    if (g.quality < 0.0) throw ValidationError(where + ".quality: must be non-negative");
    out.push_back(g);
  }
  std::stable_sort(out.begin(), out.end(), [](const GraspPose& a, const GraspPose& b) { return a.quality > b.quality; });
  return out;
}

std::vector<GraspPose> load_external_poses(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return parse_external_poses(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json external_poses_to_json(const std::vector<GraspPose>& poses) {
  json list = json::array();
  for (const GraspPose& g : poses) {
    list.push_back({{"center_mm", {g.center.x * 1e3, g.center.z * 1e3}},
                    {"width_mm", g.width * 1e3},
                    {"angle_deg", g.angle * 180.0 / kPi},
                    {"quality", g.quality}});
  }
  return {{"format", 1}, {"poses", list}};
}

}  // namespace f1grasp
