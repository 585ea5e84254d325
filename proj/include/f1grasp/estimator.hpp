#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "f1grasp/controller.hpp"

namespace f1grasp {

struct EstimatorConfig {
  double clearance = 0.010;  // added to the object extent [m]
  double noise_sigma_center = 0.0;
  double noise_sigma_width = 0.0;
  double noise_sigma_angle = 0.0;
  std::uint64_t seed = 0;
  /// Widest aperture any hand variant offers; wider objects are ungraspable.
  double max_aperture = 0.215;
  /// Smallest width the noisy estimate may report [m].
  double min_width = 0.001;

  void validate() const;
};

/// Antipodal top grasp: center over the area centroid, width = horizontal extent + clearance.
GraspPose oracle_estimate(const ObjectModel& object, const Transform2& pose, const EstimatorConfig& config);

/// Oracle perturbed by Gaussian noise drawn from a generator seeded with config.seed.
GraspPose noisy_estimate(const ObjectModel& object, const Transform2& pose, const EstimatorConfig& config);

/// External estimator file: {"format": 1, "poses": [{center_mm, width_mm, angle_deg, quality}]}.
/// Sorted by descending quality; ties keep file order.
std::vector<GraspPose> parse_external_poses(const nlohmann::json& j);
std::vector<GraspPose> load_external_poses(const std::string& path);
nlohmann::json external_poses_to_json(const std::vector<GraspPose>& poses);

}  // namespace f1grasp
