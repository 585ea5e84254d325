#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "f1grasp/controller.hpp"
#include "f1grasp/estimator.hpp"
#include "f1grasp/io.hpp"

namespace f1grasp {

enum class TrialMode { primitive, autonomous };
const char* to_string(TrialMode m);
TrialMode trial_mode_from_string(const std::string& s);

struct TrialConfig {
  HandConfig hand = make_hand_config(HandVariant::f1);
  SuiteObject object;
  TrialMode mode = TrialMode::primitive;
  int n_trials = 20;
  std::uint64_t seed = 0;
  double alignment_min_deg = -45.0;
  double alignment_max_deg = 45.0;
  double lift_height = 0.10;
  int primitive_steps = 200;
  /// Object centroid x on the table [m].
  double object_x = 0.30;
  EstimatorConfig estimator;
  /// Replaces the estimator when set; the highest-quality pose is used.
  std::optional<std::vector<GraspPose>> external_poses;
  SimConfig sim;
  BaselineProtocol baseline;

  void validate() const;
};

struct TrialResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  bool fault = false;
  std::string fault_reason;
  double peak_table_force = 0.0;
  double peak_object_force = 0.0;
  double grasp_time = 0.0;
  GraspClass classification = GraspClass::none;
  double alignment_error_deg = 0.0;
  double offset = 0.0;  // object offset from the hand mid-plane [m]
  bool slider_bottomed_out = false;
  bool table_before_object = false;
};

/// Trial seed derived from the suite seed and the trial index only.
std::uint64_t trial_seed(std::uint64_t seed, int index);

/// Lateral object offset for an alignment error: sin(error) * half extent, capped at D/4.
double alignment_offset(double error_deg, double half_extent, double D);

struct Placement {
  double alignment_error_deg = 0.0;
  double offset = 0.0;
  Transform2 object_pose;
};
/// Object placement of primitive-mode trial `index`, drawn from its trial seed.
Placement primitive_placement(const TrialConfig& config, int index);

/// Fully open F1 pre-grasp for an object centered at `object_x`, with the matching primitive.
std::pair<Transform2, GraspPrimitiveParams> primitive_pregrasp(const HandConfig& hand, double object_x, int n_steps);

/// Fills the outcome fields of `r` from the final state of a grasp attempt, including the lift test.
void finish_trial(TrialResult& r, const Simulator& sim, const WorldState& f, double duration, double lift_height);

/// `trajectory`, when given, receives the world state after every simulator step.
TrialResult run_trial(const TrialConfig& config, int index, std::vector<WorldState>* trajectory = nullptr);

struct Histogram {
  double bin_width = 2.0;
  std::vector<int> counts;  // last bin collects everything at or above its lower edge
};
Histogram force_histogram(const std::vector<double>& forces, double bin_width = 2.0, int bins = 30);

struct ObjectReport {
  int object_id = 0;
  std::string object;
  std::string gripper;
  std::string mode;
  std::vector<TrialResult> trials;  // sorted by index
  int successes = 0;
  double success_rate = 0.0;
  double median_peak_table_force = 0.0;
  double mean_grasp_time = 0.0;
  double std_grasp_time = 0.0;
  int pinch = 0;
  int envelope = 0;
  Histogram table_force_histogram;
};

struct GripperSummary {
  std::string gripper;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  double median_peak_table_force = 0.0;
  double max_peak_table_force = 0.0;
  double mean_grasp_time = 0.0;
  double std_grasp_time = 0.0;
  Histogram table_force_histogram;
};

struct SuiteReport {
  std::vector<ObjectReport> objects;
  std::vector<GripperSummary> grippers;
  /// Median peak table force of each non-baseline gripper divided by the baseline's.
  std::vector<std::pair<std::string, double>> force_median_ratio;
};

/// Runs every trial of every config. `threads` = 0 uses the hardware concurrency.
/// `order` optionally permutes execution; the report does not depend on it.
SuiteReport run_suite(const std::vector<TrialConfig>& configs, unsigned threads = 0,
                      const std::vector<std::size_t>* order = nullptr);

/// Autonomous pipeline over the given configs (mode forced to autonomous).
SuiteReport run_autonomous(std::vector<TrialConfig> configs, unsigned threads = 0);

/// Object ids used for the autonomous runs.
const std::vector<int>& autonomous_object_ids();

/// Numbers rounded to six significant digits.
nlohmann::json trial_result_to_json(const TrialResult& r);
TrialResult trial_result_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const SuiteReport& report);
std::string report_to_csv(const SuiteReport& report);
enum class ReportFormat { json, csv };
void emit_report(const SuiteReport& report, const std::string& path, ReportFormat format);

double median(std::vector<double> v);

}  // namespace f1grasp
