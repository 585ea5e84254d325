#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "f1grasp/sim.hpp"

namespace f1grasp {

struct GraspPrimitiveParams {
  double D = 0.0;     // aperture projection [m]
  Vec2 u{1.0, 0.0};   // closing direction
  int n_steps = 200;
  double q_start = 0.0;
  double q_target = 0.0;
  /// Stop the arm as soon as the finger stalls instead of completing the 0.5*D move.
  bool stop_on_stall = false;

  void validate() const;
};

struct GraspPose {
  Vec2 center;
  Vec2 approach{0.0, -1.0};
  double width = 0.0;
  double angle = 0.0;
  double quality = 1.0;
};

struct CartesianStage {
  Transform2 pose;
  double max_speed = 0.2;  // m/s
  double max_step = 1e-3;  // m
  Vec2 workspace_min{-2.0, -0.05};
  Vec2 workspace_max{2.0, 2.0};
};

/// Straight-line stage trajectory; the last pose equals `target`. Updates stage.pose.
std::vector<Transform2> stage_move_to(CartesianStage& stage, const Transform2& target);

GraspPrimitiveParams plan_primitive(const WorldState& world, const HandConfig& config, double D, Vec2 u,
                                    int n_steps = 200);

/// Motor angle at step k of n: the unloaded aperture shrinks linearly from D to zero.
double primitive_q(const GraspPrimitiveParams& params, const HandConfig& config, int k);

struct PrimitiveOutcome {
  std::vector<WorldState> trajectory;  // state after each step (empty unless recorded)
  WorldState final;
  int steps = 0;
  bool fault = false;
  bool stalled = false;
  double peak_table_force = 0.0;
  double peak_object_force = 0.0;
  double duration = 0.0;
};

PrimitiveOutcome execute_primitive(const Simulator& sim, const WorldState& start, const GraspPrimitiveParams& params,
                                   bool record = false);

/// Open hand with its fixed-finger tip at `tip` and motor angle `q`, closing along +x.
HandState open_hand(const HandConfig& hand, Vec2 tip, double q);

/// The grasp primitive one aperture step at a time. advance() returns false once it has finished.
class PrimitiveRunner {
 public:
  explicit PrimitiveRunner(GraspPrimitiveParams params);
  bool advance(const Simulator& sim, WorldState& w, std::vector<WorldState>* record = nullptr);
  bool finished() const { return finished_; }
  bool stalled() const { return stalled_; }
  int sim_steps() const { return sim_steps_; }
  const GraspPrimitiveParams& params() const { return params_; }

 private:
  GraspPrimitiveParams params_;
  int k_ = 0;
  double q_prev_ = 0.0;
  Vec2 prev_offset_;
  int sim_steps_ = 0;
  bool stalled_ = false;
  bool finished_ = false;
};

/// Operator model for the baseline gripper: the hand rises by `raise_gain` per newton of table
/// force each step while the fingers close at a constant rate.
struct BaselineProtocol {
  double raise_gain = 2.0e-5;  // m/N per step
  int closing_steps = 200;
  int settle_steps = 40;

  void validate() const;
};

class BaselineRunner {
 public:
  BaselineRunner(const HandConfig& hand, BaselineProtocol protocol, double q_start);
  bool advance(const Simulator& sim, WorldState& w, std::vector<WorldState>* record = nullptr);
  bool finished() const { return finished_; }
  int sim_steps() const { return k_; }

 private:
  BaselineProtocol protocol_;
  double dq_ = 0.0;
  int k_ = 0;
  bool finished_ = false;
};

/// Pre-grasp O_tip placement (d = w/2 behind the center along -u) and the matching primitive.
std::pair<Transform2, GraspPrimitiveParams> map_grasp_pose(const GraspPose& pose, const HandConfig& config,
                                                           Vec2 u = {1.0, 0.0}, int n_steps = 200);

nlohmann::json trajectory_record(const WorldState& w, const SimConfig& config);
void write_trajectory_log(std::ostream& out, const std::vector<WorldState>& trajectory, const SimConfig& config);

struct TrajectorySummary {
  int steps = 0;
  double duration = 0.0;
  double final_q = 0.0;
  double peak_table_force = 0.0;
  double peak_object_force = 0.0;
  double tip_travel = 0.0;
};
/// Parses a trajectory log; malformed lines raise ValidationError with the line number.
TrajectorySummary summarize_trajectory_log(std::istream& in);

}  // namespace f1grasp
