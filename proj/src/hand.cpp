#include "f1grasp/hand.hpp"

#include <algorithm>
#include <cmath>

namespace f1grasp {

void FingerLinkage::validate() const {
  for (double l : link_lengths) {
    if (!(l > 0.0)) throw ValidationError("link lengths must be positive");
  }
  if (!(q_open < q_closed)) throw ValidationError("motor range must satisfy q_open < q_closed");
  if (!(pip_spring_k > 0.0)) throw ValidationError("PIP spring constant must be positive");
  for (const JointLimit& j : joint_limits) {
    if (!(j.min <= j.max)) throw ValidationError("joint limit min exceeds max");
  }
}

const char* to_string(HandVariant v) {
  switch (v) {
    case HandVariant::f1: return "f1";
    case HandVariant::f1_wide_finger: return "f1-wide";
    case HandVariant::f1_extended: return "f1-extended";
    case HandVariant::baseline_symmetric: return "baseline";
  }
  return "?";
}

HandVariant hand_variant_from_string(const std::string& s) {
  if (s == "f1" || s == "F1") return HandVariant::f1;
  if (s == "f1-wide" || s == "F1_wide_finger" || s == "f1_wide_finger") return HandVariant::f1_wide_finger;
  if (s == "f1-extended" || s == "F1_extended" || s == "f1_extended") return HandVariant::f1_extended;
  if (s == "baseline" || s == "baseline_symmetric") return HandVariant::baseline_symmetric;
  throw ValidationError("unknown gripper '" + s + "'");
}

double BaselineGripperModel::aperture(double q) const {
  const double qc = std::clamp(q, q_open, q_closed);
  return max_aperture - 2.0 * tip_arc_radius * std::sin(qc - q_open);
}

double BaselineGripperModel::tip_drop(double q) const {
  const double qc = std::clamp(q, q_open, q_closed);
  return tip_arc_radius * (1.0 - std::cos(qc - q_open));
}

namespace {

constexpr double deg(double d) { return d * kPi / 180.0; }

}  // namespace

void place_actuated_finger(HandConfig& c) {
  const double r = c.track_radius;
  const double reach = (c.max_aperture - c.arc_bottom_aperture) / r;
  if (!(reach > 0.0 && reach < 1.0) || !(c.arc_bottom_aperture < r))
    throw ValidationError("aperture not reachable with the given finger track");
  const double closed = -std::asin(c.arc_bottom_aperture / r);
  c.linkage.q_open = 0.0;
  c.linkage.q_closed = c.track_open_angle() - closed;
  c.linkage.joint_limits = {JointLimit{0.0, c.linkage.q_closed}, JointLimit{0.0, deg(100.0)},
                            JointLimit{0.0, deg(80.0)}};
}

double HandConfig::track_open_angle() const {
  return std::asin((max_aperture - arc_bottom_aperture) / track_radius);
}

Vec2 HandConfig::track_tip(double mp) const {
  const double phi = track_open_angle() - mp;
  return {-(arc_bottom_aperture + track_radius * std::sin(phi)), arc_bottom + track_radius * (1.0 - std::cos(phi))};
}

Transform2 HandConfig::finger_base(double mp) const {
  return {-kPi / 2.0 - mp, track_tip(mp) + Vec2{0.0, linkage.total_length()}};
}

HandConfig make_hand_config(HandVariant variant) {
  HandConfig c;
  c.variant = variant;
  double finger_width = 0.004;
  switch (variant) {
    case HandVariant::f1:
      break;
    case HandVariant::f1_wide_finger:
      finger_width = 0.020;
      break;
    case HandVariant::f1_extended:
      c.max_aperture = 0.215;
      c.track_radius = 0.40;
      break;
    case HandVariant::baseline_symmetric:
      c.max_aperture = c.baseline.max_aperture;
      break;
  }
  c.fixed_finger_profile = Polygon2::rectangle({0.0, 0.0}, finger_width, 0.10);
  if (variant != HandVariant::baseline_symmetric) {
    place_actuated_finger(c);
  } else {
    c.linkage.q_open = c.baseline.q_open;
    c.linkage.q_closed = c.baseline.q_closed;
    c.linkage.joint_limits = {JointLimit{c.baseline.q_open, c.baseline.q_closed}, JointLimit{}, JointLimit{}};
  }
  return c;
}

HandState make_hand_state(const HandConfig& config, Vec2 tip, Vec2 u) {
  HandState s;
  s.tip_frame = Transform2::from_translation(tip);
  s.closing_direction = u.x >= 0.0 ? Vec2{1.0, 0.0} : Vec2{-1.0, 0.0};
  s.q = config.linkage.q_open;
  s.joints = {config.is_baseline() ? 0.0 : config.linkage.q_open, 0.0, 0.0};
  s.slider = config.slider;
  s.slider.s = 0.0;
  s.slider.reaction = 0.0;
  s.slider.bottomed_out = false;
  return s;
}

std::vector<Segment2> finger_forward_kinematics(const FingerLinkage& linkage, const std::array<double, 3>& joints,
                                                const Transform2& base) {
  for (int j = 0; j < 3; ++j) {
    const JointLimit& lim = linkage.joint_limits[static_cast<std::size_t>(j)];
    const double v = joints[static_cast<std::size_t>(j)];
    if (v < lim.min - 1e-12 || v > lim.max + 1e-12) throw ValidationError("joint angle outside its limits");
  }
  std::vector<Segment2> links;
  links.reserve(3);
  double angle = base.rotation;
  Vec2 p = base.translation;
  for (std::size_t j = 0; j < 3; ++j) {
    angle += joints[j];
    const Vec2 next = p + Vec2{std::cos(angle), std::sin(angle)} * linkage.link_lengths[j];
    links.emplace_back(p, next);
    p = next;
  }
  return links;
}

HandState finger_closure_step(const HandState& state, const FingerLinkage& linkage, double dq,
                              const std::vector<ContactPoint>& contacts) {
  if (dq < 0.0) throw ValidationError("closure increment must be non-negative");
  HandState next = state;
  next.frozen = {false, false, false};
  for (const ContactPoint& c : contacts) {
    switch (c.body_pair.first) {
      case Body::proximal: next.frozen[0] = true; break;
      case Body::middle: next.frozen[1] = true; break;
      case Body::distal: next.frozen[2] = true; break;
      default: break;
    }
  }
  next.stalled = false;
  double remaining = std::min(dq, std::max(0.0, linkage.q_closed - state.q));
  const double requested = remaining;
  if (requested <= 0.0) return next;
  std::size_t first = 0;
  if (!next.frozen[2]) {
    if (next.frozen[1]) {
      first = 2;
    } else if (next.frozen[0]) {
      first = 1;
    }
  }
  for (std::size_t j = first; j < 3 && remaining > 0.0; ++j) {
    if (next.frozen[j]) continue;
    const double room = linkage.joint_limits[j].max - next.joints[j];
    const double take = std::clamp(room, 0.0, remaining);
    next.joints[j] += take;
    remaining -= take;
  }
  const double moved = requested - remaining;
  if (moved <= 0.0) {
    next.stalled = true;
    return next;
  }
  next.q = state.q + moved;
  return next;
}

SliderState slider_react(const SliderState& slider, double vertical_load) {
  if (vertical_load < 0.0) throw ValidationError("vertical load must be non-negative");
  SliderState out = slider;
  const double free_s = (vertical_load - slider.preload) / slider.k_s;
  out.s = std::clamp(free_s, 0.0, slider.max_stroke);
  out.bottomed_out = free_s >= slider.max_stroke;
  out.reaction = std::min(vertical_load, slider.max_spring_force());
  return out;
}

std::pair<Vec2, Vec2> baseline_tip_pose(const BaselineGripperModel& model, double q) {
  if (q < model.q_open - 1e-12 || q > model.q_closed + 1e-12) throw ValidationError("baseline q out of range");
  const double half = 0.5 * model.aperture(q);
  const double h = model.tip_drop(q);
  return {Vec2{-half, -h}, Vec2{half, -h}};
}

double unloaded_aperture(const HandConfig& config, double q) {
  if (config.is_baseline()) return config.baseline.aperture(q);
  const double qc = std::clamp(q, config.linkage.q_open, config.linkage.q_closed);
  const auto links = finger_forward_kinematics(config.linkage, {qc, 0.0, 0.0}, config.finger_base(qc));
  return -links.back().b.x;
}

double aperture(const HandState& state, const HandConfig& config) {
  if (config.is_baseline()) return config.baseline.aperture(state.q);
  const auto links = finger_forward_kinematics(config.linkage, state.joints, config.finger_base(state.joints[0]));
  return -links.back().b.x;
}

double aperture_inverse(const HandConfig& config, double w) {
  double lo = config.linkage.q_open;
  double hi = config.linkage.q_closed;
  if (w >= unloaded_aperture(config, lo)) return lo;
  if (w <= unloaded_aperture(config, hi)) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (unloaded_aperture(config, mid) > w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vec2 finger_to_world(const HandState& state, const Vec2& p) {
  const Vec2 mirrored{-state.closing_direction.x * p.x, p.z};
  return state.tip_frame.apply(mirrored);
}

namespace {

Segment2 to_world(const HandState& state, const Segment2& s) {
  Segment2 w;
  w.a = finger_to_world(state, s.a);
  w.b = finger_to_world(state, s.b);
  return w;
}

}  // namespace

HandGeometry hand_geometry(const HandState& state, const HandConfig& config) {
  HandGeometry g;
  if (config.is_baseline()) {
    const auto [left, right] = baseline_tip_pose(config.baseline, state.q);
    const double pad = config.baseline.pad_length;
    const double r = config.baseline.tip_radius;
    // Rounded fingertip: a quarter circle from the lowest point up to the vertical pad face.
    constexpr int kArc = 6;
    for (int k = 0; k < kArc && r > 0.0; ++k) {
      const double a0 = kPi / 2.0 * k / kArc;
      const double a1 = kPi / 2.0 * (k + 1) / kArc;
      const double am = 0.5 * (a0 + a1);
      for (const double side : {1.0, -1.0}) {
        const Vec2 base = side > 0.0 ? left : right;
        const auto arc = [&](double a) { return base + Vec2{side * r * std::sin(a), r * (1.0 - std::cos(a))}; };
        g.segments.emplace_back(side > 0.0 ? Body::baseline_left : Body::baseline_right,
                                Segment2(state.tip_frame.apply(arc(a0)), state.tip_frame.apply(arc(a1))));
        g.surface_normals.push_back(rotate(Vec2{side * std::sin(am), -std::cos(am)}, state.tip_frame.rotation));
      }
    }
    g.segments.emplace_back(Body::baseline_left, Segment2(state.tip_frame.apply(left + Vec2{r, r}),
                                                          state.tip_frame.apply(left + Vec2{r, r + pad})));
    g.segments.emplace_back(Body::baseline_right, Segment2(state.tip_frame.apply(right + Vec2{-r, r}),
                                                           state.tip_frame.apply(right + Vec2{-r, r + pad})));
    g.surface_normals.resize(g.segments.size());
    g.fixed_tip = state.tip_frame.apply(left);
    g.actuated_tip = state.tip_frame.apply(right);
    return g;
  }
  const Vec2 lift{0.0, state.slider.s};
  const Polygon2& prof = config.fixed_finger_profile;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const Segment2 e = prof.edge(i);
    Segment2 shifted;
    shifted.a = e.a + lift;
    shifted.b = e.b + lift;
    g.segments.emplace_back(Body::fixed_finger, to_world(state, shifted));
  }
  const auto links = finger_forward_kinematics(config.linkage, state.joints, config.finger_base(state.joints[0]));
  const std::array<Body, 3> ids{Body::proximal, Body::middle, Body::distal};
  for (std::size_t j = 0; j < 3; ++j) g.segments.emplace_back(ids[j], to_world(state, links[j]));
  g.actuated_tip = finger_to_world(state, links.back().b);
  g.fixed_tip = finger_to_world(state, lift);
  g.surface_normals.resize(g.segments.size());
  return g;
}

Polygon2 fixed_finger_world(const HandState& state, const HandConfig& config) {
  std::vector<Vec2> v;
  const auto verts = config.fixed_finger_profile.vertices();
  for (const Vec2& p : verts) v.push_back(finger_to_world(state, p + Vec2{0.0, state.slider.s}));
  if (state.closing_direction.x > 0.0) std::reverse(v.begin(), v.end());
  return Polygon2(std::move(v));
}

}  // namespace f1grasp
