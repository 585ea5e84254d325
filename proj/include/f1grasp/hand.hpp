#pragma once

#include <array>
#include <string>
#include <vector>

#include "f1grasp/geometry.hpp"

namespace f1grasp {

enum class Joint : int { mp = 0, pip = 1, dip = 2 };

struct JointLimit {
  double min = 0.0;
  double max = 0.0;
};

/// Three-link underactuated finger (MP/PIP/DIP) driven by one motor.
struct FingerLinkage {
  std::array<double, 3> link_lengths{0.054, 0.036, 0.030};  // proximal, middle, distal [m]
  std::array<JointLimit, 3> joint_limits{};
  double pip_spring_k = 0.13;  // N*mm/deg, torsion springs holding the finger extended
  double q_open = 0.0;
  double q_closed = 0.0;
  double stall_torque = 4.1;  // N*m at the motor; informational
  /// Torque proxy: the motor stalls once the summed normal force on the finger reaches this [N].
  double stall_force = 4.0;

  double total_length() const { return link_lengths[0] + link_lengths[1] + link_lengths[2]; }
  void validate() const;
};

/// Spring-loaded vertical slider carrying the fixed finger.
struct SliderState {
  double s = 0.0;           // compression [m]
  double k_s = 500.0;       // N/m
  double preload = 2.0;     // N
  double max_stroke = 0.015;
  bool bottomed_out = false;
  /// Force currently transmitted through the slider [N].
  double reaction = 0.0;

  double max_spring_force() const { return preload + k_s * max_stroke; }
};

enum class HandVariant { f1, f1_wide_finger, f1_extended, baseline_symmetric };

const char* to_string(HandVariant v);
/// Accepts "f1", "f1-wide", "f1-extended", "baseline" and the enum spellings.
HandVariant hand_variant_from_string(const std::string& s);

/// Symmetric multi-linkage gripper whose fingertips drop as they close.
struct BaselineGripperModel {
  double tip_arc_radius = 0.06;
  double max_aperture = 0.125;
  double q_open = 0.0;
  double q_closed = kPi / 2.0;
  double pad_length = 0.04;
  /// Pads stay vertical; a rounded fingertip of this radius joins the lowest point to the pad face [m].
  double tip_radius = 0.005;
  double stall_force = 15.0;  // per finger [N]

  double aperture(double q) const;
  double tip_drop(double q) const;
};

struct HandConfig {
  HandVariant variant = HandVariant::f1;
  double max_aperture = 0.1305;
  /// Fixed finger outline in the finger frame at zero slider compression.
  /// Inner (grasping) face lies on x = 0, the tip on z = 0, the body at x >= 0.
  Polygon2 fixed_finger_profile;
  FingerLinkage linkage;
  SliderState slider;
  /// The MP pivot rides a parallelogram track that keeps the extended finger vertical; the
  /// fingertip follows a circle of this radius whose lowest point sits at `arc_bottom_aperture`.
  double track_radius = 0.25;
  double arc_bottom_aperture = 0.010;
  /// Height of the lowest point of the unloaded fingertip path above the fixed tip [m].
  double arc_bottom = 0.0022;
  /// Commanded slider pre-compression when the hand is set on the table [m].
  double approach_compression = 0.002;
  BaselineGripperModel baseline;

  bool is_baseline() const { return variant == HandVariant::baseline_symmetric; }
  /// Clear width between the inner finger faces of the fully open hand.
  double open_gap() const { return is_baseline() ? max_aperture - 2.0 * baseline.tip_radius : max_aperture; }
  /// Track angle at MP = 0.
  double track_open_angle() const;
  /// Unloaded fingertip position (finger frame) for MP angle `mp`.
  Vec2 track_tip(double mp) const;
  /// MP pivot transform in the finger frame for MP angle `mp`.
  Transform2 finger_base(double mp) const;
};

/// Derives the motor range and joint limits from the aperture and track parameters.
void place_actuated_finger(HandConfig& config);

/// Builds the documented default configuration of a variant.
HandConfig make_hand_config(HandVariant variant);

struct HandState {
  /// O_tip: the fixed-finger tip at zero slider compression (baseline: center between open tips).
  Transform2 tip_frame;
  /// Horizontal unit vector from the fixed finger toward the actuated finger.
  Vec2 closing_direction{1.0, 0.0};
  double q = 0.0;
  std::array<double, 3> joints{0.0, 0.0, 0.0};
  SliderState slider;
  std::array<bool, 3> frozen{false, false, false};
  bool stalled = false;
};

/// Open hand with O_tip at `tip` closing along `u`.
HandState make_hand_state(const HandConfig& config, Vec2 tip, Vec2 u);

/// Link surface segments (proximal, middle, distal) of a finger rooted at `base`.
std::vector<Segment2> finger_forward_kinematics(const FingerLinkage& linkage, const std::array<double, 3>& joints,
                                                const Transform2& base);

/// Contact-freezing transmission. Contacted links freeze their joints; with the proximal or
/// middle link blocked the increment goes to the joints beyond it, otherwise to the first
/// free joint from MP. Contacts are identified by their first body (proximal/middle/distal).
HandState finger_closure_step(const HandState& state, const FingerLinkage& linkage, double dq,
                              const std::vector<ContactPoint>& contacts);

/// Quasi-static response of the slider spring to a vertical load on the fixed finger.
SliderState slider_react(const SliderState& slider, double vertical_load);

/// Left and right fingertip positions in the gripper frame (origin between the open tips).
std::pair<Vec2, Vec2> baseline_tip_pose(const BaselineGripperModel& model, double q);

/// Horizontal distance between the fixed-finger tip and the actuated fingertip.
double aperture(const HandState& state, const HandConfig& config);
/// Unloaded aperture for motor angle q (finger extended, MP = q).
double unloaded_aperture(const HandConfig& config, double q);
/// Motor angle giving the unloaded aperture `w` (clamped to the motor range).
double aperture_inverse(const HandConfig& config, double w);

/// World-space contact geometry of the hand.
struct HandGeometry {
  std::vector<std::pair<Body, Segment2>> segments;
  /// Per segment: outward surface normal of a smooth convex patch (rounded fingertips), used as
  /// the contact normal; zero for plain segments.
  std::vector<Vec2> surface_normals;
  Vec2 actuated_tip;
  Vec2 fixed_tip;
};

/// Maps a finger-frame point to the world for a hand at `state`.
Vec2 finger_to_world(const HandState& state, const Vec2& p);
HandGeometry hand_geometry(const HandState& state, const HandConfig& config);
/// Fixed finger outline in world coordinates (counter-clockwise).
Polygon2 fixed_finger_world(const HandState& state, const HandConfig& config);

}  // namespace f1grasp
