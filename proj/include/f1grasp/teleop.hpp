#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "f1grasp/harness.hpp"

namespace f1grasp {

enum class SessionPhase { free_drive, primitive_running, lifting, done };
const char* to_string(SessionPhase p);
SessionPhase session_phase_from_string(const std::string& s);

struct OperatorInput {
  double vx = 0.0;  // m/s
  double vz = 0.0;  // m/s
  bool grasp_trigger = false;
  std::int64_t timestamp_ms = 0;
};

struct SessionConfig {
  /// Hand, object, seed, alignment range, lift height and protocol constants; trial index 0 is used.
  TrialConfig trial;
  double tick = 0.033;            // s
  double max_speed = 0.10;        // m/s
  double approach_height = 0.05;  // start height above the pre-grasp pose [m]
  int primitive_steps_per_tick = 7;

  void validate() const;
};

struct SessionState {
  long tick = 0;
  double time = 0.0;
  SessionPhase phase = SessionPhase::free_drive;
  WorldState world;
  TrialResult metrics;
  /// Lowest O_tip height reachable in free drive.
  double floor_z = 0.0;
  std::variant<std::monostate, PrimitiveRunner, BaselineRunner> runner;
};

/// One operator-controlled grasp attempt stepped at a fixed tick.
class Session {
 public:
  explicit Session(SessionConfig config);

  const SessionConfig& config() const { return config_; }
  const Simulator& simulator() const { return sim_; }
  const SessionState& state() const { return state_; }

  /// Consumes exactly one input (the most recent one) and advances one tick.
  const SessionState& step(const OperatorInput& input);

 private:
  SessionConfig config_;
  Simulator sim_;
  SessionState state_;
};

SessionState session_initial_state(const Simulator& sim, const SessionConfig& config);
SessionState session_step(const Simulator& sim, const SessionConfig& config, SessionState state,
                          const OperatorInput& input);

/// Velocity limited to `max_speed` in norm; non-finite components count as zero.
Vec2 clamp_velocity(double vx, double vz, double max_speed);

constexpr std::size_t kMaxFrameBytes = 8192;

/// State frame sent to clients at every tick.
nlohmann::json state_frame(const Simulator& sim, const SessionState& state);
std::string serialize_state(const Simulator& sim, const SessionState& state);
/// Result frame sent when a session reaches done.
nlohmann::json result_frame(const SessionState& state);

struct StateFrame {
  long tick = 0;
  double time = 0.0;
  SessionPhase phase = SessionPhase::free_drive;
  Vec2 tip;
  double q = 0.0;
  std::array<double, 3> joints{0.0, 0.0, 0.0};
  double slider_s = 0.0;
  Transform2 object_pose;
  std::size_t contacts = 0;
  double table_force = 0.0;
  double object_force = 0.0;
  bool success = false;
};
StateFrame parse_state_frame(const nlohmann::json& j);

/// Trajectory log line carried inside a state frame.
nlohmann::json trajectory_record_from_frame(const nlohmann::json& frame);

/// Client messages.
struct ResetRequest {
  std::string object;
  std::string gripper = "f1";
  std::uint64_t seed = 0;
};
using ClientMessage = std::variant<OperatorInput, ResetRequest>;
ClientMessage parse_client_message(const std::string& text);

/// Session log: a header line, one line per tick with the consumed input and a digest of the
/// resulting frame, and a result line once the session is done.
class SessionRecorder {
 public:
  SessionRecorder(std::ostream& out, const Session& session);
  void record(const OperatorInput& input, const Session& session);

 private:
  std::ostream& out_;
  bool result_written_ = false;
};

nlohmann::json session_log_header(const SessionConfig& config);
SessionConfig session_config_from_header(const nlohmann::json& header, const std::vector<SuiteObject>& suite);
std::uint64_t frame_digest(const std::string& frame);

struct ReplayReport {
  bool empty = false;
  bool diverged = false;
  long divergence_tick = -1;
  std::string detail;
  long ticks = 0;
  SessionPhase phase = SessionPhase::free_drive;
  TrialResult result;
};

/// Replays a session log; `seed_override` replaces the recorded seed.
ReplayReport replay_session_log(std::istream& in, const std::vector<SuiteObject>& suite,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace f1grasp
