#include "f1grasp/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "f1grasp/lp.hpp"

namespace f1grasp {

void ObjectModel::validate() const {
  if (!(mass > 0.0)) throw ValidationError("object '" + name + "': mass must be positive");
  if (!(mu_table >= 0.0) || !(mu_finger >= 0.0)) throw ValidationError("object '" + name + "': negative friction");
  if (!(depth >= 0.0)) throw ValidationError("object '" + name + "': negative depth");
}

Transform2 place_on_table(const ObjectModel& object, double center_x, double table_height) {
  const Vec2 c = object.cross_section.centroid();
  return Transform2::from_translation({center_x - c.x, table_height - object.cross_section.min_z()});
}

const char* to_string(ContactMode m) {
  switch (m) {
    case ContactMode::stick: return "stick";
    case ContactMode::slide: return "slide";
    case ContactMode::tip: return "tip";
  }
  return "?";
}

const char* to_string(GraspClass g) {
  switch (g) {
    case GraspClass::none: return "none";
    case GraspClass::pinch: return "pinch";
    case GraspClass::envelope: return "envelope";
  }
  return "?";
}

GraspClass grasp_class_from_string(const std::string& s) {
  for (GraspClass g : {GraspClass::none, GraspClass::pinch, GraspClass::envelope})
    if (s == to_string(g)) return g;
  throw ValidationError("unknown grasp class '" + s + "'");
}

namespace {

// Faces resting on the table are pushed this far below it for hand contacts.
constexpr double kHiddenDepth = 0.01;
constexpr double kNegligibleMove = 1e-9;
constexpr double kStallBand = 0.98;

bool is_actuated_link(Body b) { return b == Body::proximal || b == Body::middle || b == Body::distal; }
bool is_hand(Body b) { return b != Body::table && b != Body::object; }

std::vector<Vec2> support_points(const Polygon2& poly, double table_height, double tol) {
  std::vector<Vec2> s;
  for (const Vec2& v : poly.vertices()) {
    if (v.z <= table_height + tol) s.push_back(v);
  }
  if (s.empty()) {
    s.push_back(*std::min_element(poly.vertices().begin(), poly.vertices().end(),
                                  [](const Vec2& a, const Vec2& b) { return a.z < b.z; }));
  }
  return s;
}

// Half-plane contact of a hand segment with the table top; normal points into the table.
std::vector<ContactPoint> table_contacts(const Segment2& seg, double table_height, double tol) {
  const double da = table_height - seg.a.z;
  const double db = table_height - seg.b.z;
  std::vector<ContactPoint> out;
  if (da < -tol && db < -tol) return out;
  ContactPoint c;
  c.normal = {0.0, -1.0};
  c.body_pair = {Body::object, Body::table};
  if (std::abs(da - db) <= 1e-12) {
    c.position = (seg.a + seg.b) * 0.5;
    c.penetration_depth = std::max(0.0, da);
  } else {
    c.position = da > db ? seg.a : seg.b;
    c.penetration_depth = std::max(0.0, std::max(da, db));
  }
  out.push_back(c);
  return out;
}

void add_wrench_column(lp::Matrix& A, int col, const Vec2& p, const Vec2& c, const Vec2& e) {
  A(0, col) = e.x;
  A(1, col) = e.z;
  A(2, col) = cross(p - c, e);
}

}  // namespace

ContactResolution resolve_object(const std::vector<ContactPoint>& contacts, const ObjectModel& object,
                                 const Transform2& pose, const SimConfig& config) {
  ContactResolution r;
  const Polygon2 poly = transform_apply(pose, object.cross_section);
  const Vec2 c = poly.centroid();
  const double mg = object.weight();
  const auto supports = support_points(poly, config.table_height, config.contact_tol);
  const int nc = static_cast<int>(contacts.size());
  const int ns = static_cast<int>(supports.size());

  r.forces.reserve(contacts.size());
  for (const ContactPoint& cp : contacts) r.forces.push_back(config.contact_stiffness * cp.penetration_depth);
  r.modes.assign(contacts.size(), ContactMode::stick);
  if (contacts.empty()) return r;

  // Static balance: finger normal magnitudes are fixed by the penalty law, friction free
  // inside the cones; table supports are free inside theirs.
  lp::Matrix A(3 + nc, 2 * nc + 2 * ns);
  std::vector<double> b(static_cast<std::size_t>(3 + nc), 0.0);
  b[1] = mg;
  for (int i = 0; i < nc; ++i) {
    const ContactPoint& cp = contacts[static_cast<std::size_t>(i)];
    const FrictionCone cone = friction_cone(cp.normal, object.mu_finger);
    add_wrench_column(A, 2 * i, cp.position, c, cone.edge1);
    add_wrench_column(A, 2 * i + 1, cp.position, c, cone.edge2);
    A(3 + i, 2 * i) = dot(cone.edge1, cp.normal);
    A(3 + i, 2 * i + 1) = dot(cone.edge2, cp.normal);
    b[static_cast<std::size_t>(3 + i)] = r.forces[static_cast<std::size_t>(i)];
  }
  for (int k = 0; k < ns; ++k) {
    const FrictionCone cone = friction_cone({0.0, 1.0}, object.mu_table);
    add_wrench_column(A, 2 * nc + 2 * k, supports[static_cast<std::size_t>(k)], c, cone.edge1);
    add_wrench_column(A, 2 * nc + 2 * k + 1, supports[static_cast<std::size_t>(k)], c, cone.edge2);
  }
  if (lp::feasible(A, b)) return r;

  Vec2 net;
  for (int i = 0; i < nc; ++i) net += contacts[static_cast<std::size_t>(i)].normal * r.forces[static_cast<std::size_t>(i)];
  const double normal_load = std::max(0.0, mg - net.z);
  const bool slides = std::abs(net.x) > object.mu_table * normal_load;

  double dir = net.x > 0.0 ? 1.0 : (net.x < 0.0 ? -1.0 : 0.0);
  if (dir == 0.0) {
    double tau = 0.0;
    for (int i = 0; i < nc; ++i) {
      const ContactPoint& cp = contacts[static_cast<std::size_t>(i)];
      tau += cross(cp.position - c, cp.normal * r.forces[static_cast<std::size_t>(i)]);
    }
    dir = tau < 0.0 ? 1.0 : -1.0;
  }
  Vec2 pivot = supports.front();
  for (const Vec2& s : supports) {
    if (dir * s.x > dir * pivot.x) pivot = s;
  }
  double tau_total = cross(c - pivot, Vec2{0.0, -mg});
  double inertia = 0.0;
  double r_max = 0.0;
  for (int i = 0; i < nc; ++i) {
    const ContactPoint& cp = contacts[static_cast<std::size_t>(i)];
    tau_total += cross(cp.position - pivot, cp.normal * r.forces[static_cast<std::size_t>(i)]);
    const double rr = (cp.position - pivot).norm();
    inertia += rr * rr;
    r_max = std::max(r_max, rr);
  }
  const bool tips = dir * tau_total < 0.0;

  if (slides && (!tips || config.prefer_slide_over_tip)) {
    double push_sq = 0.0;
    for (const ContactPoint& cp : contacts) push_sq += cp.normal.x * cp.normal.x;
    const double excess = (std::abs(net.x) - object.mu_table * normal_load) / config.contact_stiffness;
    const double step = excess / std::max(push_sq, 1e-6) * (1.0 + 1e-6) + 1e-12;
    if (step < kNegligibleMove) return r;
    r.mode = ContactMode::slide;
    r.dx = dir * std::min(step, config.max_object_step);
  } else if (tips) {
    const double k = config.contact_stiffness * std::max(inertia, 1e-12);
    double mag = std::abs(tau_total) / k * (1.0 + 1e-6) + 1e-12;
    if (r_max > 0.0) mag = std::min(mag, config.max_object_step / r_max);
    if (mag * r_max < kNegligibleMove) return r;
    r.mode = ContactMode::tip;
    r.pivot = pivot;
    r.dtheta = tau_total < 0.0 ? -mag : mag;
  } else {
    // No admissible motion: the contacts stay loaded.
    return r;
  }
  for (int i = 0; i < nc; ++i) r.modes[static_cast<std::size_t>(i)] = r.mode;
  return r;
}

bool lift_test(const std::vector<ContactPoint>& contacts, const ObjectModel& object, const Transform2& pose,
               double /*height*/) {
  std::vector<const ContactPoint*> fingers;
  for (const ContactPoint& cp : contacts) {
    if (cp.body_pair.first != Body::table && cp.body_pair.second != Body::table) fingers.push_back(&cp);
  }
  if (fingers.empty()) return false;
  const Vec2 c = transform_apply(pose, object.cross_section).centroid();
  const int n = static_cast<int>(fingers.size());
  lp::Matrix A(3, 2 * n);
  for (int i = 0; i < n; ++i) {
    const FrictionCone cone = friction_cone(fingers[static_cast<std::size_t>(i)]->normal, object.mu_finger);
    add_wrench_column(A, 2 * i, fingers[static_cast<std::size_t>(i)]->position, c, cone.edge1);
    add_wrench_column(A, 2 * i + 1, fingers[static_cast<std::size_t>(i)]->position, c, cone.edge2);
  }
  const std::vector<double> b{0.0, object.weight(), 0.0};
  return lp::feasible(A, b);
}

GraspClass classify_grasp(const std::vector<ContactPoint>& contacts) {
  bool fixed = false;
  std::array<bool, 3> links{false, false, false};
  bool left = false;
  bool right = false;
  for (const ContactPoint& cp : contacts) {
    if (cp.body_pair.second != Body::object) continue;
    switch (cp.body_pair.first) {
      case Body::fixed_finger: fixed = true; break;
      case Body::proximal: links[0] = true; break;
      case Body::middle: links[1] = true; break;
      case Body::distal: links[2] = true; break;
      case Body::baseline_left: left = true; break;
      case Body::baseline_right: right = true; break;
      default: break;
    }
  }
  const int n_links = static_cast<int>(links[0]) + static_cast<int>(links[1]) + static_cast<int>(links[2]);
  if (n_links >= 2) return GraspClass::envelope;
  if (links[2] && n_links == 1 && fixed) return GraspClass::pinch;
  if (left && right) return GraspClass::pinch;
  return GraspClass::none;
}

std::vector<ContactPoint> WorldState::object_contacts() const {
  std::vector<ContactPoint> out;
  for (const ContactPoint& c : contacts) {
    if (c.body_pair.second == Body::object && is_hand(c.body_pair.first)) out.push_back(c);
  }
  return out;
}

Simulator::Simulator(HandConfig hand, std::optional<ObjectModel> object, SimConfig config)
    : hand_(std::move(hand)),
      object_(std::move(object)),
      config_(config) {
  if (!(config_.contact_stiffness > 0.0) || !(config_.dt > 0.0) || !(config_.max_substep > 0.0))
    throw ValidationError("simulator constants must be positive");
  hand_.linkage.validate();
  if (object_) object_->validate();
}

Polygon2 Simulator::object_world(const WorldState& world) const {
  return transform_apply(world.object_pose, object_->cross_section);
}

Polygon2 Simulator::contact_shape(const WorldState& world) const {
  const Polygon2 poly = object_world(world);
  std::vector<Vec2> v(poly.vertices().begin(), poly.vertices().end());
  bool moved = false;
  for (Vec2& p : v) {
    if (p.z <= config_.table_height + config_.contact_tol) {
      p.z = config_.table_height - kHiddenDepth;
      moved = true;
    }
  }
  if (!moved) return poly;
  try {
    return Polygon2(std::move(v));
  } catch (const ValidationError&) {
    return poly;
  }
}

WorldState Simulator::initial_state(const HandState& hand, const Transform2& object_pose) const {
  WorldState w;
  w.hand = hand;
  w.object_pose = object_pose;
  w.object_present = object_.has_value();
  w.table_height = config_.table_height;
  return settle(w);
}

WorldState Simulator::settle(const WorldState& world) const {
  WorldState w = world;
  if (!hand_.is_baseline()) solve_slider(w);
  update_contacts(w);
  return w;
}

std::vector<ContactPoint> Simulator::detect(const WorldState& w, bool include_table) const {
  std::vector<ContactPoint> out;
  const HandGeometry g = hand_geometry(w.hand, hand_);
  std::optional<Polygon2> obj;
  if (w.object_present && object_) obj = contact_shape(w);
  for (std::size_t i = 0; i < g.segments.size(); ++i) {
    const auto& [body, seg] = g.segments[i];
    const Vec2 smooth = g.surface_normals[i];
    if (obj) {
      for (ContactPoint c : polygon_segment_contact(*obj, seg, config_.contact_tol)) {
        c.body_pair = {body, Body::object};
        if (smooth != Vec2{}) c.normal = smooth;
        out.push_back(c);
      }
    }
    if (include_table) {
      for (ContactPoint c : table_contacts(seg, config_.table_height, config_.contact_tol)) {
        c.body_pair = {body, Body::table};
        out.push_back(c);
      }
    }
  }
  return out;
}

void Simulator::solve_slider(WorldState& w) const {
  std::optional<Polygon2> obj;
  if (w.object_present && object_) obj = contact_shape(w);
  const auto load_at = [&](double s) {
    HandState h = w.hand;
    h.slider.s = s;
    const Polygon2 finger = fixed_finger_world(h, hand_);
    double load = 0.0;
    for (std::size_t i = 0; i < finger.size(); ++i) {
      const Segment2 e = finger.edge(i);
      for (const ContactPoint& c : table_contacts(e, config_.table_height, config_.contact_tol))
        load += config_.contact_stiffness * c.penetration_depth;
      if (!obj) continue;
      for (const ContactPoint& c : polygon_segment_contact(*obj, e, config_.contact_tol)) {
        if (-c.normal.z > 0.0) load += config_.contact_stiffness * c.penetration_depth * -c.normal.z;
      }
    }
    return load;
  };
  SliderState& sl = w.hand.slider;
  const auto excess = [&](double s, double load) { return load - (sl.preload + sl.k_s * s); };
  // Bracket the root nearest the previous stroke so the finger cannot jump onto another equilibrium.
  double a = std::clamp(sl.s, 0.0, sl.max_stroke);
  double la = load_at(a);
  double fa = excess(a, la);
  double s = a;
  double load = la;
  if (fa != 0.0) {
    const double dir = fa > 0.0 ? 1.0 : -1.0;
    double step = 2e-5;
    double b = a, lb = la, fb = fa;
    bool bracketed = false;
    while (true) {
      b = std::clamp(a + dir * step, 0.0, sl.max_stroke);
      lb = load_at(b);
      fb = excess(b, lb);
      if ((fb > 0.0) != (fa > 0.0) || fb == 0.0) {
        bracketed = true;
        break;
      }
      if (b == 0.0 || b == sl.max_stroke) break;
      a = b;
      la = lb;
      fa = fb;
      step *= 2.0;
    }
    s = b;
    load = lb;
    if (bracketed && fb != 0.0) {
      // Illinois regula falsi; the load is piecewise linear in s.
      int side = 0;
      for (int i = 0; i < 80 && std::abs(b - a) > 1e-13; ++i) {
        s = (a * fb - b * fa) / (fb - fa);
        load = load_at(s);
        const double fs = excess(s, load);
        if (std::abs(fs) < 1e-9) break;
        if ((fs > 0.0) == (fa > 0.0)) {
          a = s;
          fa = fs;
          if (side == 1) fb *= 0.5;
          side = 1;
        } else {
          b = s;
          fb = fs;
          if (side == -1) fa *= 0.5;
          side = -1;
        }
      }
    }
  }
  const SliderState reacted = slider_react(sl, load);
  sl.bottomed_out = reacted.bottomed_out;
  sl.reaction = reacted.reaction;
  sl.s = s;
}

namespace {

Transform2 rotate_about(const Transform2& pose, const Vec2& pivot, double angle) {
  const Transform2 r{angle, pivot - rotate(pivot, angle)};
  return r.compose(pose);
}

Transform2 drop_to_table(const Transform2& pose, const Polygon2& body, double table_height) {
  const Polygon2 w = transform_apply(pose, body);
  Transform2 out = pose;
  out.translation.z += table_height - w.min_z();
  return out;
}

// Rolls an unsupported object onto a stable face.
Transform2 settle_under_gravity(Transform2 pose, const Polygon2& body, double table_height, double tol) {
  for (std::size_t iter = 0; iter < body.size() + 1; ++iter) {
    const Polygon2 w = transform_apply(pose, body);
    const auto sup = support_points(w, table_height, tol);
    double lo = sup.front().x;
    double hi = sup.front().x;
    Vec2 lo_v = sup.front();
    Vec2 hi_v = sup.front();
    for (const Vec2& s : sup) {
      if (s.x < lo) { lo = s.x; lo_v = s; }
      if (s.x > hi) { hi = s.x; hi_v = s; }
    }
    const double cx = w.centroid().x;
    if (cx >= lo - 1e-12 && cx <= hi + 1e-12) return pose;
    const bool right = cx > hi;
    const Vec2 pivot = right ? hi_v : lo_v;
    double best = kPi;
    for (const Vec2& v : w.vertices()) {
      const Vec2 r = v - pivot;
      if (r.norm() < 1e-12) continue;
      const double ang = right ? std::atan2(r.z, r.x) : std::atan2(r.z, -r.x);
      if (ang > 1e-12 && ang < best) best = ang;
    }
    if (best >= kPi) return pose;
    pose = rotate_about(pose, pivot, right ? -best : best);
    pose = drop_to_table(pose, body, table_height);
  }
  return pose;
}

}  // namespace

void Simulator::resolve(WorldState& w) const {
  if (!w.object_present || !object_) return;
  const ObjectModel& obj = *object_;
  int iter = 0;
  bool moved_any = false;
  for (; iter < config_.max_iterations; ++iter) {
    std::vector<ContactPoint> cs;
    for (const ContactPoint& c : detect(w, false)) cs.push_back(c);
    const ContactResolution r = resolve_object(cs, obj, w.object_pose, config_);
    w.last_mode = r.mode;
    if (cs.empty()) {
      if (moved_any || w.object_pose.rotation != 0.0) {
        w.object_pose = settle_under_gravity(w.object_pose, obj.cross_section, config_.table_height,
                                             config_.contact_tol);
      }
      return;
    }
    if (r.mode == ContactMode::stick) return;
    moved_any = true;
    if (r.mode == ContactMode::slide) {
      w.object_pose.translation.x += r.dx;
    } else {
      w.object_pose = rotate_about(w.object_pose, r.pivot, r.dtheta);
    }
    w.object_pose = drop_to_table(w.object_pose, obj.cross_section, config_.table_height);
  }
  w.fault = true;
  w.fault_reason = "contact resolution did not converge";
}

void Simulator::update_contacts(WorldState& w) const {
  w.contacts = detect(w, true);
  if (w.object_present && object_) {
    const Polygon2 poly = object_world(w);
    for (const Vec2& s : support_points(poly, config_.table_height, config_.contact_tol)) {
      ContactPoint c;
      c.position = s;
      c.normal = {0.0, -1.0};
      c.penetration_depth = 0.0;
      c.body_pair = {Body::object, Body::table};
      w.contacts.push_back(c);
    }
  }
  w.table_force = 0.0;
  w.object_force = 0.0;
  for (const ContactPoint& c : w.contacts) {
    if (!is_hand(c.body_pair.first)) continue;
    const double f = config_.contact_stiffness * c.penetration_depth;
    if (c.body_pair.second == Body::table) {
      w.table_force += f;
      const bool resting_fixed = c.body_pair.first == Body::fixed_finger;
      if (!resting_fixed && w.first_table_contact_tick < 0) w.first_table_contact_tick = w.tick;
    } else {
      w.object_force += f;
      if (w.first_object_contact_tick < 0) w.first_object_contact_tick = w.tick;
      const bool fixed_side = c.body_pair.first == Body::fixed_finger || c.body_pair.first == Body::baseline_left;
      if (fixed_side) {
        if (w.first_fixed_contact_tick < 0) w.first_fixed_contact_tick = w.tick;
      } else if (w.first_actuated_contact_tick < 0) {
        w.first_actuated_contact_tick = w.tick;
      }
    }
  }
  w.peak_table_force = std::max(w.peak_table_force, w.table_force);
  w.peak_object_force = std::max(w.peak_object_force, w.object_force);
  if (!w.fault && (w.table_force > config_.fault_force || w.object_force > config_.fault_force)) {
    w.fault = true;
    w.fault_reason = "contact force above the wrist-sensor limit";
  }
}

double Simulator::finger_squeeze(const WorldState& w) const {
  double left = 0.0;
  double right = 0.0;
  for (const ContactPoint& c : detect(w, false)) {
    const double f = config_.contact_stiffness * c.penetration_depth;
    if (c.body_pair.first == Body::baseline_left) {
      left += f;
    } else if (is_actuated_link(c.body_pair.first) || c.body_pair.first == Body::baseline_right) {
      right += f;
    }
  }
  return std::max(left, right);
}

void Simulator::backdrive(WorldState& w) const {
  const double limit = hand_.is_baseline() ? hand_.baseline.stall_force : hand_.linkage.stall_force;
  const double f0 = finger_squeeze(w);
  if (f0 <= limit) return;
  double* joint = nullptr;
  if (hand_.is_baseline()) {
    joint = &w.hand.q;
  } else {
    for (int j = 2; j >= 0 && !joint; --j) {
      if (w.hand.joints[static_cast<std::size_t>(j)] > 0.0) joint = &w.hand.joints[static_cast<std::size_t>(j)];
    }
  }
  if (!joint) return;
  const double start = *joint;
  const double floor = hand_.is_baseline() ? hand_.baseline.q_open : 0.0;
  const auto excess_at = [&](double delta) {
    *joint = start - delta;
    if (hand_.is_baseline()) w.hand.joints[0] = w.hand.q;
    return finger_squeeze(w) - limit;
  };
  double a = 0.0, fa = f0 - limit;
  double b = start - floor, fb = excess_at(b);
  double delta = b;
  if (fb < 0.0) {
    int side = 0;
    for (int i = 0; i < 40; ++i) {
      delta = (a * fb - b * fa) / (fb - fa);
      const double fd = excess_at(delta);
      if (fd <= 0.0 && fd > -0.01 * limit) break;
      if (fd > 0.0) {
        a = delta;
        fa = fd;
        if (side == 1) fb *= 0.5;
        side = 1;
      } else {
        b = delta;
        fb = fd;
        if (side == -1) fa *= 0.5;
        side = -1;
      }
    }
    if (excess_at(delta) > 0.0) excess_at(b);
  }
  const double moved = start - *joint;
  if (!hand_.is_baseline()) w.hand.q = std::max(hand_.linkage.q_open, w.hand.q - moved);
  w.hand.stalled = true;
}

void Simulator::substep(WorldState& w, const Vec2& d_tip, double dq) const {
  w.hand.tip_frame.translation += d_tip;
  if (hand_.is_baseline()) {
    double left = 0.0;
    double right = 0.0;
    for (const ContactPoint& c : w.contacts) {
      const double f = config_.contact_stiffness * c.penetration_depth;
      if (c.body_pair.first == Body::baseline_left) left += f;
      if (c.body_pair.first == Body::baseline_right) right += f;
    }
    if (std::max(left, right) >= kStallBand * hand_.baseline.stall_force) {
      w.hand.stalled = true;
    } else {
      w.hand.stalled = false;
      w.hand.q = std::min(w.hand.q + dq, hand_.baseline.q_closed);
      w.hand.joints[0] = w.hand.q;
    }
  } else {
    double finger_force = 0.0;
    std::vector<ContactPoint> link_contacts;
    for (const ContactPoint& c : w.contacts) {
      if (!is_actuated_link(c.body_pair.first)) continue;
      finger_force += config_.contact_stiffness * c.penetration_depth;
      link_contacts.push_back(c);
    }
    if (finger_force >= kStallBand * hand_.linkage.stall_force) {
      HandState h = finger_closure_step(w.hand, hand_.linkage, 0.0, link_contacts);
      h.stalled = true;
      w.hand = h;
    } else {
      w.hand = finger_closure_step(w.hand, hand_.linkage, dq, link_contacts);
    }
    solve_slider(w);
  }
  resolve(w);
  backdrive(w);
  if (!hand_.is_baseline()) solve_slider(w);
  update_contacts(w);
}

WorldState Simulator::step(const WorldState& world, const HandCommand& cmd, double dt) const {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  if (cmd.d_tip.norm() > config_.max_hand_step) throw ValidationError("hand step exceeds per-step limit");
  if (cmd.dq < 0.0 || cmd.dq > config_.max_dq) throw ValidationError("dq outside per-step limit");
  WorldState w = world;
  if (w.fault) return w;
  const double reach = hand_.is_baseline() ? hand_.baseline.tip_arc_radius : hand_.linkage.total_length();
  const double travel = std::max(cmd.d_tip.norm(), reach * cmd.dq);
  const int n = std::max(1, static_cast<int>(std::ceil(travel / config_.max_substep)));
  const Vec2 d = cmd.d_tip * (1.0 / n);
  const double dq = cmd.dq / n;
  for (int i = 0; i < n && !w.fault; ++i) substep(w, d, dq);
  if (n == 0 || travel == 0.0) update_contacts(w);
  w.time = world.time + dt;
  w.tick = world.tick + 1;
  return w;
}

bool Simulator::lift(const WorldState& world, double height) const {
  if (!world.object_present || !object_) return false;
  return lift_test(world.object_contacts(), *object_, world.object_pose, height);
}

}  // namespace f1grasp
