#include <doctest.h>

#include <random>

#include "f1grasp/controller.hpp"
#include "f1grasp/harness.hpp"
#include "f1grasp/sim.hpp"
#include "oracles.hpp"

using namespace f1grasp;

namespace {

ObjectModel block(double w, double h, double mass, double mu_table, double mu_finger = 0.6) {
  ObjectModel o;
  o.name = "block";
  o.cross_section = Polygon2::rectangle({-w / 2, 0.0}, w, h);
  o.mass = mass;
  o.mu_table = mu_table;
  o.mu_finger = mu_finger;
  return o;
}

ContactPoint push(Vec2 p, Vec2 n, double force, const SimConfig& cfg, Body b = Body::distal) {
  ContactPoint c;
  c.position = p;
  c.normal = n.normalized();
  c.penetration_depth = force / cfg.contact_stiffness;
  c.body_pair = {b, Body::object};
  return c;
}

/// Static balance of one finger contact of fixed normal force plus table supports at the two
/// bottom corners, decided by basic-solution enumeration.
bool stick_oracle(const ObjectModel& o, const ContactPoint& c, double force, double mu_table) {
  const std::vector<Vec2> verts(o.cross_section.vertices().begin(), o.cross_section.vertices().end());
  const Vec2 g = oracle::area_centroid(verts);
  std::vector<std::vector<double>> cols;
  for (const Vec2& e : oracle::cone_edges(c.normal, o.mu_finger)) {
    auto w = oracle::wrench(c.position, g, e);
    w.push_back(e.x * c.normal.x + e.z * c.normal.z);
    cols.push_back(w);
  }
  for (const Vec2& v : verts) {
    if (v.z > 1e-12) continue;
    for (const Vec2& e : oracle::cone_edges({0.0, 1.0}, mu_table)) {
      auto w = oracle::wrench(v, g, e);
      w.push_back(0.0);
      cols.push_back(w);
    }
  }
  return oracle::cone_contains(cols, {0.0, o.weight(), 0.0, force});
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("no contacts leave the object in place") {
  const SimConfig cfg;
  const ContactResolution r = resolve_object({}, block(0.02, 0.02, 0.1, 0.4), {}, cfg);
  CHECK(r.mode == ContactMode::stick);
  CHECK(r.dx == 0.0);
  CHECK(r.dtheta == 0.0);
  CHECK(r.forces.empty());
}

TEST_CASE("frictionless table slides under a horizontal push") {
  const SimConfig cfg;
  const ObjectModel o = block(0.02, 0.02, 0.1, 0.0);
  const ContactResolution r = resolve_object({push({-0.01, 0.005}, {1, 0}, 1.0, cfg)}, o, {}, cfg);
  CHECK(r.mode == ContactMode::slide);
  CHECK(r.dx > 0.0);
}

TEST_CASE("Coulomb threshold") {
  const SimConfig cfg;
  const ObjectModel o = block(0.04, 0.01, 5.0 / kGravity, 0.3, 0.0);
  CHECK(resolve_object({push({-0.02, 0.002}, {1, 0}, 2.0, cfg)}, o, {}, cfg).mode == ContactMode::slide);
  CHECK(resolve_object({push({-0.02, 0.002}, {1, 0}, 1.0, cfg)}, o, {}, cfg).mode == ContactMode::stick);
}

TEST_CASE("tall thin object tips about its far corner") {
  const SimConfig cfg;
  const double base = 0.01, height = 0.1, h = 0.09;
  const ObjectModel o = block(base, height, 0.1, 2.0, 0.0);
  const double tip_force = o.weight() * (base / 2) / h;
  const ContactResolution r = resolve_object({push({-base / 2, h}, {1, 0}, 2.0 * tip_force, cfg)}, o, {}, cfg);
  CHECK(r.mode == ContactMode::tip);
  CHECK(r.pivot.x == doctest::Approx(base / 2));
  CHECK(r.pivot.z == doctest::Approx(0.0));
  CHECK(r.dtheta < 0.0);
  CHECK(resolve_object({push({-base / 2, h}, {1, 0}, 0.5 * tip_force, cfg)}, o, {}, cfg).mode == ContactMode::stick);
}

TEST_CASE("balanced squeeze sticks") {
  const SimConfig cfg;
  const ObjectModel o = block(0.03, 0.02, 0.1, 0.4);
  const auto r = resolve_object({push({-0.015, 0.01}, {1, 0}, 3.0, cfg), push({0.015, 0.01}, {-1, 0}, 3.0, cfg)}, o,
                                {}, cfg);
  CHECK(r.mode == ContactMode::stick);
  CHECK(r.dx == 0.0);
}

TEST_CASE("single-contact stick classification matches the enumeration oracle") {
  const SimConfig cfg;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0, sticks = 0;
  for (int t = 0; compared < 500 && t < 5000; ++t) {
    const double w = 0.01 + 0.05 * u(rng);
    const double h = 0.005 + 0.1 * u(rng);
    ObjectModel o = block(w, h, 0.02 + 0.3 * u(rng), 0.1 + 0.9 * u(rng), 0.2 + 0.8 * u(rng));
    const double force = o.weight() * 3.0 * u(rng);
    const Vec2 n = rotate({1.0, 0.0}, (u(rng) - 0.5) * 100.0 * kPi / 180.0);
    const ContactPoint c = push({-w / 2, h * (0.05 + 0.9 * u(rng))}, n, force, cfg);
    const bool lo = stick_oracle(o, c, force * 1.01, o.mu_table * 0.99);
    const bool hi = stick_oracle(o, c, force * 0.99, o.mu_table * 1.01);
    if (lo != hi) continue;
    const ContactResolution r = resolve_object({c}, o, {}, cfg);
    CHECK((r.mode == ContactMode::stick) == lo);
    sticks += lo;
    ++compared;
  }
  CHECK(compared == 500);
  CHECK(sticks > 50);
  CHECK(sticks < 450);
}

TEST_CASE("lift test examples") {
  const SimConfig cfg;
  const ObjectModel o = block(0.03, 0.02, 1.0, 0.4, 0.5);
  const Vec2 c = o.cross_section.centroid();
  CHECK(lift_test({push({-0.015, c.z}, {1, 0}, 1, cfg), push({0.015, c.z}, {-1, 0}, 1, cfg)}, o, {}));
  ObjectModel slick = o;
  slick.mu_finger = 0.0;
  CHECK_FALSE(lift_test({push({-0.015, 0.005}, {1, 0}, 1, cfg)}, slick, {}));
  CHECK_FALSE(lift_test({}, o, {}));
}

TEST_CASE("lift test agrees with the cone-combination oracle") {
  std::mt19937_64 rng(4242);
  int compared = 0, holds = 0;
  for (int t = 0; compared < 500 && t < 5000; ++t) {
    const oracle::LiftInstance in = oracle::random_lift_instance(rng);
    const int verdict = oracle::lift_verdict(in);
    if (verdict < 0) continue;
    ObjectModel o;
    o.name = "random";
    o.cross_section = Polygon2(in.vertices);
    o.mass = in.mass;
    o.mu_finger = in.mu;
    CHECK(lift_test(in.contacts, o, {}) == (verdict == 1));
    holds += verdict;
    ++compared;
  }
  CHECK(compared == 500);
  CHECK(holds > 50);
  CHECK(holds < 450);
}

TEST_CASE("grasp classification") {
  auto c = [](Body b) {
    ContactPoint p;
    p.body_pair = {b, Body::object};
    return p;
  };
  CHECK(classify_grasp({c(Body::fixed_finger), c(Body::distal)}) == GraspClass::pinch);
  CHECK(classify_grasp({c(Body::proximal), c(Body::middle), c(Body::distal)}) == GraspClass::envelope);
  CHECK(classify_grasp({}) == GraspClass::none);
  CHECK(classify_grasp({c(Body::baseline_left), c(Body::baseline_right)}) == GraspClass::pinch);
  CHECK(grasp_class_from_string("envelope") == GraspClass::envelope);
}

TEST_CASE("envelope closure on a cylinder matches the oracle") {
  ObjectModel cyl;
  cyl.name = "cylinder";
  cyl.cross_section = Polygon2::regular({0.0, 0.0}, 0.035, 24, -kPi / 2 - kPi / 24);
  cyl.mass = 0.2;
  const HandConfig hand = make_hand_config(HandVariant::f1);
  const Simulator sim(hand, cyl);
  const Transform2 pose = place_on_table(cyl, 0.30);
  GraspPose gp;
  gp.center = {0.30, 0.0};
  gp.width = hand.max_aperture;
  const auto [pre, params] = map_grasp_pose(gp, hand);
  const WorldState w0 = sim.initial_state(open_hand(hand, pre.translation, params.q_start), pose);
  const PrimitiveOutcome out = execute_primitive(sim, w0, params);
  REQUIRE_FALSE(out.fault);
  const auto contacts = out.final.object_contacts();
  CHECK(classify_grasp(contacts) == GraspClass::envelope);

  oracle::LiftInstance in;
  const Polygon2 world = transform_apply(out.final.object_pose, cyl.cross_section);
  in.vertices.assign(world.vertices().begin(), world.vertices().end());
  in.contacts = contacts;
  in.mass = cyl.mass;
  in.mu = cyl.mu_finger;
  const int verdict = oracle::lift_verdict(in);
  REQUIRE(verdict >= 0);
  CHECK(sim.lift(out.final) == (verdict == 1));
}

TEST_CASE("trial invariants") {
  const auto suite = load_object_suite(F1GRASP_DATA_DIR "/objects.json");
  for (const char* name : {"coin", "mug", "apple", "clamp"}) {
    TrialConfig c;
    c.object = find_object(suite, name);
    c.seed = 3;
    std::vector<WorldState> traj;
    const TrialResult r = run_trial(c, 1, &traj);
    REQUIRE(traj.size() > 10);
    double peak_t = 0.0, peak_o = 0.0;
    for (const WorldState& w : traj) {
      CHECK(w.peak_table_force >= peak_t);
      CHECK(w.peak_object_force >= peak_o);
      peak_t = w.peak_table_force;
      peak_o = w.peak_object_force;
      CHECK(w.table_force >= 0.0);
      for (const ContactPoint& cp : w.contacts) {
        CHECK(cp.penetration_depth >= 0.0);
        if (cp.body_pair.first == Body::object && cp.body_pair.second == Body::table)
          CHECK(cp.penetration_depth <= c.sim.contact_tol);
      }
      if (!w.hand.slider.bottomed_out)
        CHECK(w.peak_table_force <= c.hand.slider.max_spring_force() + 1e-9);
    }
    CHECK(r.peak_table_force == traj.back().peak_table_force);
  }
}

TEST_CASE("trajectories are bit-identical across runs") {
  const auto suite = load_object_suite(F1GRASP_DATA_DIR "/objects.json");
  TrialConfig c;
  c.object = find_object(suite, "banana");
  c.seed = 8;
  std::vector<WorldState> a, b;
  run_trial(c, 4, &a);
  run_trial(c, 4, &b);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(trajectory_record(a[i], c.sim).dump() == trajectory_record(b[i], c.sim).dump());
}

TEST_CASE("simulator rejects bad constants") {
  SimConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(Simulator(make_hand_config(HandVariant::f1), std::nullopt, bad), ValidationError);
}

}  // TEST_SUITE
