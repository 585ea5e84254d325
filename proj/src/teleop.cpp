#include "f1grasp/teleop.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace f1grasp {

using nlohmann::json;

const char* to_string(SessionPhase p) {
  switch (p) {
    case SessionPhase::free_drive: return "free_drive";
    case SessionPhase::primitive_running: return "primitive_running";
    case SessionPhase::lifting: return "lifting";
    case SessionPhase::done: return "done";
  }
  return "?";
}

SessionPhase session_phase_from_string(const std::string& s) {
  for (SessionPhase p : {SessionPhase::free_drive, SessionPhase::primitive_running, SessionPhase::lifting,
                         SessionPhase::done})
    if (s == to_string(p)) return p;
  throw ValidationError("unknown session phase '" + s + "'");
}

void SessionConfig::validate() const {
  trial.validate();
  if (!(tick > 0.0) || !std::isfinite(tick)) throw ValidationError("session tick must be positive");
  if (!(max_speed > 0.0) || !std::isfinite(max_speed)) throw ValidationError("session max_speed must be positive");
  if (!(approach_height >= 0.0)) throw ValidationError("session approach_height must be non-negative");
  if (primitive_steps_per_tick < 1) throw ValidationError("session primitive_steps_per_tick must be at least 1");
}

Vec2 clamp_velocity(double vx, double vz, double max_speed) {
  Vec2 v{std::isfinite(vx) ? vx : 0.0, std::isfinite(vz) ? vz : 0.0};
  const double n = v.norm();
  if (n > max_speed) v = v * (max_speed / n);
  return v;
}

namespace {

void finish(const Simulator& sim, const SessionConfig& config, SessionState& s, int sim_steps) {
  finish_trial(s.metrics, sim, s.world, sim_steps * sim.config().dt, config.trial.lift_height);
  s.runner = std::monostate{};
  s.phase = SessionPhase::done;
}

bool touches_object(const WorldState& w) {
  for (const ContactPoint& c : w.object_contacts()) {
    if (c.penetration_depth > 0.0) return true;
  }
  return false;
}

}  // namespace

SessionState session_initial_state(const Simulator& sim, const SessionConfig& config) {
  config.validate();
  const TrialConfig& trial = config.trial;
  const HandConfig& hand = sim.hand_config();
  SessionState s;
  const Placement place = primitive_placement(trial, 0);
  s.metrics.index = 0;
  s.metrics.seed = trial_seed(trial.seed, 0);
  s.metrics.alignment_error_deg = place.alignment_error_deg;
  s.metrics.offset = place.offset;
  Vec2 tip;
  double q = 0.0;
  if (hand.is_baseline()) {
    q = hand.baseline.q_open;
    tip = {trial.object_x, hand.baseline.tip_drop(q)};
  } else {
    const auto [pre, params] = primitive_pregrasp(hand, trial.object_x, trial.primitive_steps);
    q = params.q_start;
    tip = pre.translation;
  }
  s.floor_z = tip.z;
  tip.z += config.approach_height;
  s.world = sim.initial_state(open_hand(hand, tip, q), place.object_pose);
  return s;
}

SessionState session_step(const Simulator& sim, const SessionConfig& config, SessionState s,
                          const OperatorInput& input) {
  const HandConfig& hand = sim.hand_config();
  ++s.tick;
  s.time = s.tick * config.tick;
  switch (s.phase) {
    case SessionPhase::free_drive: {
      if (input.grasp_trigger) {
        if (hand.is_baseline()) {
          s.runner = BaselineRunner(hand, config.trial.baseline, s.world.hand.q);
        } else {
          const double D = std::min(aperture(s.world.hand, hand), hand.max_aperture);
          s.runner = PrimitiveRunner(plan_primitive(s.world, hand, D, {1.0, 0.0}, config.trial.primitive_steps));
        }
        s.phase = SessionPhase::primitive_running;
        break;
      }
      const Vec2 v = clamp_velocity(input.vx, input.vz, config.max_speed);
      if (v == Vec2{}) break;
      Vec2 tip = s.world.hand.tip_frame.translation + v * config.tick;
      tip.z = std::max(tip.z, s.floor_z);
      const WorldState next = sim.initial_state(open_hand(hand, tip, s.world.hand.q), s.world.object_pose);
      if (!next.fault && !touches_object(next)) s.world = next;
      break;
    }
    case SessionPhase::primitive_running: {
      int sim_steps = 0;
      bool more = true;
      for (int i = 0; i < config.primitive_steps_per_tick && more; ++i) {
        more = std::visit(
            [&](auto& r) -> bool {
              using R = std::decay_t<decltype(r)>;
              if constexpr (std::is_same_v<R, std::monostate>) {
                return false;
              } else {
                const bool m = r.advance(sim, s.world);
                sim_steps = r.sim_steps();
                return m;
              }
            },
            s.runner);
      }
      s.metrics.peak_table_force = s.world.peak_table_force;
      s.metrics.peak_object_force = s.world.peak_object_force;
      s.metrics.grasp_time = sim_steps * sim.config().dt;
      if (s.world.fault) {
        finish(sim, config, s, sim_steps);
      } else if (!more) {
        s.phase = SessionPhase::lifting;
      }
      break;
    }
    case SessionPhase::lifting: {
      const int sim_steps = std::visit(
          [](const auto& r) -> int {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, std::monostate>) return 0;
            else return r.sim_steps();
          },
          s.runner);
      finish(sim, config, s, sim_steps);
      break;
    }
    case SessionPhase::done:
      break;
  }
  return s;
}

Session::Session(SessionConfig config)
    : config_(std::move(config)),
      sim_(config_.trial.hand, config_.trial.object.model, config_.trial.sim),
      state_(session_initial_state(sim_, config_)) {}

const SessionState& Session::step(const OperatorInput& input) {
  state_ = session_step(sim_, config_, std::move(state_), input);
  return state_;
}

json state_frame(const Simulator& sim, const SessionState& s) {
  const WorldState& w = s.world;
  json forces = json::array();
  for (const ContactPoint& c : w.contacts) {
    const double f = sim.config().contact_stiffness * c.penetration_depth;
    if (f > 0.0) forces.push_back({{"bodies", {to_string(c.body_pair.first), to_string(c.body_pair.second)}}, {"f", f}});
  }
  return {{"format", 1},
          {"type", "state"},
          {"tick", s.tick},
          {"t", s.time},
          {"phase", to_string(s.phase)},
          {"gripper", to_string(sim.hand_config().variant)},
          {"object", sim.object() ? sim.object()->name : std::string()},
          {"aperture", aperture(w.hand, sim.hand_config())},
          {"stalled", w.hand.stalled},
          {"forces", forces},
          {"peak_forces", {{"table", w.peak_table_force}, {"object", w.peak_object_force}}},
          {"world", trajectory_record(w, sim.config())},
          {"metrics", trial_result_to_json(s.metrics)}};
}

std::string serialize_state(const Simulator& sim, const SessionState& state) { return state_frame(sim, state).dump(); }

json result_frame(const SessionState& s) {
  return {{"format", 1}, {"type", "result"}, {"tick", s.tick}, {"t", s.time}, {"result", trial_result_to_json(s.metrics)}};
}

StateFrame parse_state_frame(const json& j) {
  try {
    if (j.at("format") != 1) throw ValidationError("state frame: unsupported format " + j.at("format").dump());
    if (j.at("type") != "state") throw ValidationError("state frame: wrong type");
    StateFrame f;
    f.tick = j.at("tick").get<long>();
    f.time = j.at("t").get<double>();
    f.phase = session_phase_from_string(j.at("phase").get<std::string>());
    const json& w = j.at("world");
    f.tip = {w.at("O_tip")[0].get<double>(), w.at("O_tip")[1].get<double>()};
    f.q = w.at("q").get<double>();
    for (std::size_t i = 0; i < 3; ++i) f.joints[i] = w.at("joints")[i].get<double>();
    f.slider_s = w.at("slider_s").get<double>();
    const json& p = w.at("object_pose");
    f.object_pose = {p[2].get<double>(), {p[0].get<double>(), p[1].get<double>()}};
    f.contacts = w.at("contacts").size();
    f.table_force = w.at("forces").at("table").get<double>();
    f.object_force = w.at("forces").at("object").get<double>();
    f.success = j.at("metrics").at("success").get<bool>();
    return f;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("state frame: ") + e.what());
  }
}

json trajectory_record_from_frame(const json& frame) {
  if (!frame.contains("world")) throw ValidationError("state frame: missing world");
  return frame.at("world");
}

ClientMessage parse_client_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("message: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("message: missing type");
  const std::string type = j["type"];
  try {
    if (type == "input") {
      OperatorInput in;
      in.vx = j.value("vx", 0.0);
      in.vz = j.value("vz", 0.0);
      in.grasp_trigger = j.value("grasp", false);
      in.timestamp_ms = j.value("timestamp", std::int64_t{0});
      return in;
    }
    if (type == "reset") {
      ResetRequest r;
      r.object = j.at("object").is_string() ? j["object"].get<std::string>() : j["object"].dump();
      r.gripper = j.value("gripper", std::string("f1"));
      r.seed = j.value("seed", std::uint64_t{0});
      return r;
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("message: ") + e.what());
  }
  throw ValidationError("message: unknown type '" + type + "'");
}

std::uint64_t frame_digest(const std::string& frame) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : frame) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json session_log_header(const SessionConfig& c) {
  return {{"format", 1},
          {"type", "session"},
          {"object", c.trial.object.model.name},
          {"gripper", to_string(c.trial.hand.variant)},
          {"seed", c.trial.seed},
          {"alignment_deg", {c.trial.alignment_min_deg, c.trial.alignment_max_deg}},
          {"object_x", c.trial.object_x},
          {"tick", c.tick},
          {"max_speed", c.max_speed},
          {"approach_height", c.approach_height},
          {"primitive_steps_per_tick", c.primitive_steps_per_tick}};
}

SessionConfig session_config_from_header(const json& h, const std::vector<SuiteObject>& suite) {
  if (!h.is_object() || h.value("type", std::string()) != "session")
    throw ValidationError("session log: first line is not a session header");
  if (!h.contains("format")) throw ValidationError("session log: missing format");
  if (h["format"] != 1) throw ValidationError("session log: unsupported format version " + h["format"].dump());
  try {
    SessionConfig c;
    c.trial.object = find_object(suite, h.at("object").get<std::string>());
    c.trial.hand = make_hand_config(hand_variant_from_string(h.at("gripper").get<std::string>()));
    c.trial.seed = h.at("seed").get<std::uint64_t>();
    c.trial.alignment_min_deg = h.at("alignment_deg")[0].get<double>();
    c.trial.alignment_max_deg = h.at("alignment_deg")[1].get<double>();
    c.trial.object_x = h.at("object_x").get<double>();
    c.tick = h.at("tick").get<double>();
    c.max_speed = h.at("max_speed").get<double>();
    c.approach_height = h.at("approach_height").get<double>();
    c.primitive_steps_per_tick = h.at("primitive_steps_per_tick").get<int>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("session log header: ") + e.what());
  }
}

namespace {

json input_json(const OperatorInput& in) {
  return {{"vx", in.vx}, {"vz", in.vz}, {"grasp", in.grasp_trigger}, {"timestamp", in.timestamp_ms}};
}

}  // namespace

SessionRecorder::SessionRecorder(std::ostream& out, const Session& session) : out_(out) {
  out_ << session_log_header(session.config()).dump() << '\n';
}

void SessionRecorder::record(const OperatorInput& input, const Session& session) {
  const SessionState& s = session.state();
  json line{{"type", "tick"},
            {"tick", s.tick},
            {"input", input_json(input)},
            {"digest", frame_digest(serialize_state(session.simulator(), s))}};
  out_ << line.dump() << '\n';
  if (s.phase == SessionPhase::done && !result_written_) {
    out_ << result_frame(s).dump() << '\n';
    result_written_ = true;
  }
}

ReplayReport replay_session_log(std::istream& in, const std::vector<SuiteObject>& suite,
                                std::optional<std::uint64_t> seed_override) {
  ReplayReport rep;
  std::string line;
  long lineno = 0;
  auto next_line = [&](json& j) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& e) {
        throw ValidationError("session log line " + std::to_string(lineno) + ": " + e.what());
      }
      return true;
    }
    return false;
  };
  json j;
  if (!next_line(j)) {
    rep.empty = true;
    return rep;
  }
  SessionConfig config = session_config_from_header(j, suite);
  if (seed_override) config.trial.seed = *seed_override;
  Session session(config);
  std::optional<TrialResult> recorded;
  while (next_line(j)) {
    const std::string type = j.value("type", std::string());
    const std::string where = "session log line " + std::to_string(lineno);
    if (type == "result") {
      recorded = trial_result_from_json(j.at("result"));
      continue;
    }
    if (type != "tick") throw ValidationError(where + ": unknown record type '" + type + "'");
    try {
      const json& i = j.at("input");
      OperatorInput input;
      input.vx = i.at("vx").get<double>();
      input.vz = i.at("vz").get<double>();
      input.grasp_trigger = i.at("grasp").get<bool>();
      input.timestamp_ms = i.value("timestamp", std::int64_t{0});
      const long tick = j.at("tick").get<long>();
      if (tick != session.state().tick + 1) throw ValidationError(where + ": tick out of sequence");
      session.step(input);
      const std::uint64_t digest = frame_digest(serialize_state(session.simulator(), session.state()));
      if (!rep.diverged && digest != j.at("digest").get<std::uint64_t>()) {
        rep.diverged = true;
        rep.divergence_tick = tick;
        rep.detail = "state diverges from the recording at tick " + std::to_string(tick);
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  rep.ticks = session.state().tick;
  rep.phase = session.state().phase;
  rep.result = session.state().metrics;
  if (recorded && !rep.diverged &&
      trial_result_to_json(*recorded) != trial_result_to_json(rep.result)) {
    rep.diverged = true;
    rep.detail = "replayed result differs from the recorded result";
  }
  return rep;
}

}  // namespace f1grasp
