#include "f1grasp/controller.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace f1grasp {

using nlohmann::json;

void GraspPrimitiveParams::validate() const {
  if (!(D >= 0.0)) throw ValidationError("primitive: D must be non-negative");
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(u.z) > 1e-12)
    throw ValidationError("primitive: u must be a horizontal unit vector");
  if (n_steps < 1) throw ValidationError("primitive: n_steps must be at least 1");
  if (q_start > q_target) throw ValidationError("primitive: q_start exceeds q_target");
}

std::vector<Transform2> stage_move_to(CartesianStage& stage, const Transform2& target) {
  const Vec2 t = target.translation;
  if (t.x < stage.workspace_min.x || t.z < stage.workspace_min.z || t.x > stage.workspace_max.x ||
      t.z > stage.workspace_max.z)
    throw ValidationError("stage target outside the workspace");
  if (!(stage.max_step > 0.0)) throw ValidationError("stage max_step must be positive");
  const Transform2 start = stage.pose;
  const Vec2 delta = t - start.translation;
  const double drot = target.rotation - start.rotation;
  const int n = static_cast<int>(std::ceil(delta.norm() / stage.max_step - 1e-12));
  std::vector<Transform2> out;
  for (int k = 1; k <= n; ++k) {
    if (k == n) {
      out.push_back(target);
      break;
    }
    const double f = static_cast<double>(k) / n;
    out.push_back({start.rotation + drot * f, start.translation + delta * f});
  }
  if (n == 0 && drot != 0.0) out.push_back(target);
  stage.pose = target;
  return out;
}

GraspPrimitiveParams plan_primitive(const WorldState& world, const HandConfig& config, double D, Vec2 u,
                                    int n_steps) {
  if (D > config.max_aperture + 1e-12) throw ValidationError("primitive: D exceeds the maximum aperture");
  if (D > aperture(world.hand, config) + 1e-9) throw ValidationError("primitive: D exceeds the current aperture");
  GraspPrimitiveParams p;
  p.D = D;
  p.u = u;
  p.n_steps = n_steps;
  p.q_start = world.hand.q;
  p.q_target = config.linkage.q_closed;
  p.validate();
  return p;
}

double primitive_q(const GraspPrimitiveParams& params, const HandConfig& config, int k) {
  if (k <= 0) return params.q_start;
  if (k >= params.n_steps) return params.q_target;
  const double a = params.D * (1.0 - static_cast<double>(k) / params.n_steps);
  return std::clamp(aperture_inverse(config, a), params.q_start, params.q_target);
}

PrimitiveOutcome execute_primitive(const Simulator& sim, const WorldState& start, const GraspPrimitiveParams& params,
                                   bool record) {
  PrimitiveOutcome out;
  WorldState w = start;
  PrimitiveRunner runner(params);
  while (runner.advance(sim, w, record ? &out.trajectory : nullptr)) {
  }
  out.steps = runner.sim_steps();
  out.fault = w.fault;
  out.stalled = runner.stalled();
  out.peak_table_force = w.peak_table_force;
  out.peak_object_force = w.peak_object_force;
  out.duration = out.steps * sim.config().dt;
  out.final = std::move(w);
  return out;
}

HandState open_hand(const HandConfig& hand, Vec2 tip, double q) {
  HandState h = make_hand_state(hand, tip, {1.0, 0.0});
  h.q = q;
  h.joints[0] = q;
  return h;
}

PrimitiveRunner::PrimitiveRunner(GraspPrimitiveParams params) : params_(params), q_prev_(params.q_start) {
  params_.validate();
}

bool PrimitiveRunner::advance(const Simulator& sim, WorldState& w, std::vector<WorldState>* record) {
  if (finished_) return false;
  if (w.fault) {
    finished_ = true;
    return false;
  }
  ++k_;
  const Vec2 offset = params_.u * (0.5 * params_.D * static_cast<double>(k_) / params_.n_steps);
  const double q_next = primitive_q(params_, sim.hand_config(), k_);
  const Vec2 d = offset - prev_offset_;
  const double dq = std::max(0.0, q_next - q_prev_);
  const int chunks = std::max({1, static_cast<int>(std::ceil(dq / sim.config().max_dq)),
                               static_cast<int>(std::ceil(d.norm() / sim.config().max_hand_step))});
  for (int c = 0; c < chunks && !w.fault; ++c) {
    w = sim.step(w, {d * (1.0 / chunks), dq / chunks});
    ++sim_steps_;
    if (record) record->push_back(w);
  }
  prev_offset_ = offset;
  q_prev_ = q_next;
  if (w.hand.stalled) stalled_ = true;
  finished_ = w.fault || k_ >= params_.n_steps || (w.hand.stalled && params_.stop_on_stall);
  return !finished_;
}

void BaselineProtocol::validate() const {
  if (!(raise_gain >= 0.0)) throw ValidationError("baseline protocol: raise_gain must be non-negative");
  if (closing_steps < 1 || settle_steps < 0) throw ValidationError("baseline protocol: invalid step counts");
}

BaselineRunner::BaselineRunner(const HandConfig& hand, BaselineProtocol protocol, double q_start)
    : protocol_(protocol), dq_((hand.baseline.q_closed - q_start) / protocol.closing_steps) {
  protocol_.validate();
  if (!hand.is_baseline()) throw ValidationError("baseline runner needs the baseline gripper");
}

bool BaselineRunner::advance(const Simulator& sim, WorldState& w, std::vector<WorldState>* record) {
  if (finished_) return false;
  if (w.fault) {
    finished_ = true;
    return false;
  }
  const double rise = std::min(protocol_.raise_gain * w.table_force, sim.config().max_hand_step);
  const double dq = k_ < protocol_.closing_steps ? std::min(dq_, sim.config().max_dq) : 0.0;
  w = sim.step(w, {{0.0, rise}, dq});
  ++k_;
  if (record) record->push_back(w);
  bool left = false;
  bool right = false;
  for (const ContactPoint& c : w.object_contacts()) {
    left = left || c.body_pair.first == Body::baseline_left;
    right = right || c.body_pair.first == Body::baseline_right;
  }
  const bool holding = w.hand.stalled && left && right && w.table_force == 0.0;
  finished_ = w.fault || holding || k_ >= protocol_.closing_steps + protocol_.settle_steps;
  return !finished_;
}

std::pair<Transform2, GraspPrimitiveParams> map_grasp_pose(const GraspPose& pose, const HandConfig& config, Vec2 u,
                                                           int n_steps) {
  if (!(pose.width >= 0.0)) throw ValidationError("grasp pose: width must be non-negative");
  if (pose.width > config.max_aperture + 1e-12) throw ValidationError("grasp pose: width exceeds the maximum aperture");
  if (std::abs(pose.approach.norm() - 1.0) > 1e-9) throw ValidationError("grasp pose: approach must be a unit vector");
  const double d = 0.5 * pose.width;
  Vec2 tip{pose.center.x - u.x * d, pose.center.z};
  if (!config.is_baseline()) tip.z -= config.approach_compression;
  GraspPrimitiveParams p;
  p.D = pose.width;
  p.u = u;
  p.n_steps = n_steps;
  p.q_start = aperture_inverse(config, pose.width);
  p.q_target = config.linkage.q_closed;
  p.validate();
  return {Transform2::from_translation(tip), p};
}

json trajectory_record(const WorldState& w, const SimConfig& config) {
  json contacts = json::array();
  for (const ContactPoint& c : w.contacts) {
    contacts.push_back({{"bodies", {to_string(c.body_pair.first), to_string(c.body_pair.second)}},
                        {"p", {c.position.x, c.position.z}},
                        {"n", {c.normal.x, c.normal.z}},
                        {"depth", c.penetration_depth},
                        {"force", config.contact_stiffness * c.penetration_depth}});
  }
  return {{"t", w.time},
          {"tick", w.tick},
          {"O_tip", {w.hand.tip_frame.translation.x, w.hand.tip_frame.translation.z}},
          {"q", w.hand.q},
          {"joints", {w.hand.joints[0], w.hand.joints[1], w.hand.joints[2]}},
          {"slider_s", w.hand.slider.s},
          {"object_pose", {w.object_pose.translation.x, w.object_pose.translation.z, w.object_pose.rotation}},
          {"contacts", contacts},
          {"forces", {{"table", w.table_force}, {"object", w.object_force}}}};
}

void write_trajectory_log(std::ostream& out, const std::vector<WorldState>& trajectory, const SimConfig& config) {
  out << json{{"format", 1}, {"type", "trajectory"}, {"dt", config.dt}}.dump() << '\n';
  for (const WorldState& w : trajectory) out << trajectory_record(w, config).dump() << '\n';
}

TrajectorySummary summarize_trajectory_log(std::istream& in) {
  TrajectorySummary s;
  std::string line;
  int line_no = 0;
  bool header = false;
  Vec2 first;
  Vec2 last;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!header) {
      if (!j.contains("format") || j["format"] != 1 || j.value("type", "") != "trajectory")
        throw ValidationError("line " + std::to_string(line_no) + ": expected a format 1 trajectory header");
      header = true;
      continue;
    }
    try {
      const Vec2 tip{j.at("O_tip").at(0).get<double>(), j.at("O_tip").at(1).get<double>()};
      if (s.steps == 0) first = tip;
      last = tip;
      s.duration = j.at("t").get<double>();
      s.final_q = j.at("q").get<double>();
      s.peak_table_force = std::max(s.peak_table_force, j.at("forces").at("table").get<double>());
      s.peak_object_force = std::max(s.peak_object_force, j.at("forces").at("object").get<double>());
    } catch (const json::exception& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    ++s.steps;
  }
  if (!header) throw ValidationError("empty trajectory log");
  s.tip_travel = (last - first).norm();
  return s;
}

}  // namespace f1grasp
