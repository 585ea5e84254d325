#pragma once

#include <optional>
#include <string>
#include <vector>

#include "f1grasp/geometry.hpp"
#include "f1grasp/hand.hpp"

namespace f1grasp {

/// Planar stand-in for a table-top object: a cross-section with mass and friction.
struct ObjectModel {
  std::string name;
  Polygon2 cross_section;  // body frame
  double mass = 0.1;       // kg
  double mu_table = 0.4;
  double mu_finger = 0.6;
  /// Extent perpendicular to the grasp plane; 0 means the footprint is isotropic.
  double depth = 0.0;
  std::string provenance;

  void validate() const;
  double weight() const { return mass * kGravity; }
  double width() const { return cross_section.max_x() - cross_section.min_x(); }
  double height() const { return cross_section.max_z() - cross_section.min_z(); }
};

/// Pose that rests the object on the table with its cross-section centroid at x = center_x.
Transform2 place_on_table(const ObjectModel& object, double center_x, double table_height = 0.0);

struct SimConfig {
  double contact_stiffness = 1e4;  // N/m
  double dt = 0.005;               // s
  double max_object_step = 1e-3;  // m per resolution iteration
  /// Hand motion is subdivided so that no hand point moves more than this per substep.
  double max_substep = 1e-4;
  double contact_tol = kDefaultContactTol;
  int max_iterations = 60;
  /// Any hand contact force above this aborts the trial (wrist-sensor emergency stop).
  double fault_force = 60.0;
  /// Per-call command limits.
  double max_hand_step = 0.01;
  double max_dq = 0.2;
  bool prefer_slide_over_tip = true;
  double table_height = 0.0;
};

enum class ContactMode { stick, slide, tip };
const char* to_string(ContactMode m);

struct ContactResolution {
  ContactMode mode = ContactMode::stick;
  std::vector<ContactMode> modes;  // one per finger contact
  double dx = 0.0;
  double dz = 0.0;
  double dtheta = 0.0;
  Vec2 pivot;                      // rotation centre for tip mode
  std::vector<double> forces;      // normal force per finger contact [N]
};

/// Object response to the current finger contacts (normals point into the object).
/// Precedence: stick if a static force balance exists, else slide, else tip.
ContactResolution resolve_object(const std::vector<ContactPoint>& contacts, const ObjectModel& object,
                                 const Transform2& pose, const SimConfig& config);

/// True iff forces inside the finger friction cones can hold the object against gravity.
/// Table contacts are ignored.
bool lift_test(const std::vector<ContactPoint>& contacts, const ObjectModel& object, const Transform2& pose,
               double height = 0.10);

enum class GraspClass { none, pinch, envelope };
const char* to_string(GraspClass g);
GraspClass grasp_class_from_string(const std::string& s);
GraspClass classify_grasp(const std::vector<ContactPoint>& contacts);

struct HandCommand {
  Vec2 d_tip;      // O_tip increment [m]
  double dq = 0.0; // motor increment [rad]
};

struct WorldState {
  double time = 0.0;
  long tick = 0;
  bool object_present = true;
  Transform2 object_pose;
  HandState hand;
  double table_height = 0.0;
  /// Contacts after the last step; first body is the hand part (or object for table contacts).
  std::vector<ContactPoint> contacts;
  double table_force = 0.0;
  double object_force = 0.0;
  double peak_table_force = 0.0;
  double peak_object_force = 0.0;
  ContactMode last_mode = ContactMode::stick;
  long first_fixed_contact_tick = -1;
  long first_actuated_contact_tick = -1;
  long first_table_contact_tick = -1;
  long first_object_contact_tick = -1;
  bool fault = false;
  std::string fault_reason;

  /// Contacts between hand parts and the object.
  std::vector<ContactPoint> object_contacts() const;
};

/// Fixed-step quasi-static world. Holds immutable configuration; stepping is a pure function.
class Simulator {
 public:
  Simulator(HandConfig hand, std::optional<ObjectModel> object, SimConfig config = {});

  const HandConfig& hand_config() const { return hand_; }
  const SimConfig& config() const { return config_; }
  const std::optional<ObjectModel>& object() const { return object_; }

  WorldState initial_state(const HandState& hand, const Transform2& object_pose) const;
  WorldState step(const WorldState& world, const HandCommand& cmd, double dt) const;
  WorldState step(const WorldState& world, const HandCommand& cmd) const { return step(world, cmd, config_.dt); }

  /// Re-evaluates contacts and the slider for the current poses without moving anything.
  WorldState settle(const WorldState& world) const;

  Polygon2 object_world(const WorldState& world) const;
  /// Object outline seen by the hand: faces resting on the table extend below it.
  Polygon2 contact_shape(const WorldState& world) const;
  bool lift(const WorldState& world, double height = 0.10) const;

 private:
  void substep(WorldState& w, const Vec2& d_tip, double dq) const;
  void update_contacts(WorldState& w) const;
  void solve_slider(WorldState& w) const;
  void resolve(WorldState& w) const;
  /// Torque-limited motor: a finger pushed past its stall force yields.
  void backdrive(WorldState& w) const;
  double finger_squeeze(const WorldState& w) const;
  std::vector<ContactPoint> detect(const WorldState& w, bool include_table) const;

  HandConfig hand_;
  std::optional<ObjectModel> object_;
  SimConfig config_;
};

}  // namespace f1grasp
