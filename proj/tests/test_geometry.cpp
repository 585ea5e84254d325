#include <doctest.h>

#include <random>

#include "f1grasp/geometry.hpp"
#include "f1grasp/lp.hpp"
#include "oracles.hpp"

using namespace f1grasp;

TEST_SUITE("geometry") {

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon2({{0, 0}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(Polygon2({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), ValidationError);  // clockwise
  CHECK_THROWS_AS(Polygon2({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ValidationError);  // self-intersecting
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 1, 1);
  CHECK(sq.signed_area() == doctest::Approx(1.0));
  CHECK(sq.centroid().x == doctest::Approx(0.5));
  CHECK(sq.is_convex());
  CHECK(sq.signed_distance({0.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(sq.signed_distance({2.0, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("separated segment gives no contact") {
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 1, 1);
  CHECK(polygon_segment_contact(sq, Segment2({5, 5}, {6, 5})).empty());
}

TEST_CASE("segment tangent to the top edge") {
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 1, 1);
  const double tol = kDefaultContactTol;
  const auto cs = polygon_segment_contact(sq, Segment2({0.2, 1.0 + tol / 2}, {0.8, 1.0 + tol / 2}), tol);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].normal.x == doctest::Approx(0.0));
  CHECK(cs[0].normal.z == doctest::Approx(-1.0));
  CHECK(cs[0].penetration_depth == 0.0);
}

TEST_CASE("contact detection matches dense point sampling") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::uniform_real_distribution<double> rad(0.005, 0.04);
  std::uniform_int_distribution<int> nv(3, 10);
  const double tol = kDefaultContactTol;
  const double res = 1e-4;
  int checked = 0;
  int touching = 0;
  for (int trial = 0; checked < 200 && trial < 2000; ++trial) {
    const auto verts = oracle::random_convex(rng, {u(rng), u(rng)}, rad(rng), nv(rng));
    Polygon2 poly;
    try {
      poly = Polygon2(verts);
    } catch (const ValidationError&) {
      continue;
    }
    if (poly.signed_area() < 1e-6) continue;
    const Segment2 seg({u(rng), u(rng)}, {u(rng), u(rng)});
    const int n = std::max(2, static_cast<int>(std::ceil(seg.length() / res)) + 1);
    double dmin = 1e300;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / (n - 1);
      dmin = std::min(dmin, oracle::convex_signed_distance(verts, seg.a + (seg.b - seg.a) * t));
    }
    if (std::abs(dmin - tol) < res) continue;  // boundary within one sampling cell
    const auto cs = polygon_segment_contact(poly, seg, tol);
    const bool oracle_touch = dmin <= tol;
    CHECK(!cs.empty() == oracle_touch);
    for (const ContactPoint& c : cs) {
      CHECK(c.normal.norm() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(c.penetration_depth >= 0.0);
    }
    touching += oracle_touch;
    ++checked;
  }
  CHECK(checked == 200);
  CHECK(touching > 20);
}

TEST_CASE("flipped contact reverses the normal exactly") {
  ContactPoint c;
  c.normal = {0.6, -0.8};
  c.body_pair = {Body::distal, Body::object};
  const ContactPoint f = c.flipped();
  CHECK(f.normal.x == -0.6);
  CHECK(f.normal.z == 0.8);
  CHECK(f.body_pair.first == Body::object);
  CHECK(f.body_pair.second == Body::distal);
}

TEST_CASE("transform_apply") {
  const Polygon2 sq = Polygon2::rectangle({0, 0}, 0.02, 0.01);
  const Polygon2 same = transform_apply(Transform2::identity(), sq);
  for (std::size_t i = 0; i < sq.size(); ++i) CHECK(same[i] == sq[i]);

  const Transform2 half(kPi, {});
  const Polygon2 back = transform_apply(half, transform_apply(half, sq));
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(back[i].x == doctest::Approx(sq[i].x).epsilon(1e-9));
    CHECK(std::abs(back[i].z - sq[i].z) < 1e-9);
  }

  const Polygon2 moved = transform_apply(Transform2::from_translation({0.01, 0.0}), sq);
  CHECK(moved.centroid().x - sq.centroid().x == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(moved.centroid().z == doctest::Approx(sq.centroid().z));
}

TEST_CASE("transform compose and inverse") {
  const Transform2 a(0.3, {0.1, -0.2});
  const Transform2 b(-1.1, {0.05, 0.4});
  const Vec2 p{0.7, 0.2};
  const Vec2 ab = a.compose(b).apply(p);
  const Vec2 ref = a.apply(b.apply(p));
  CHECK(ab.x == doctest::Approx(ref.x));
  CHECK(ab.z == doctest::Approx(ref.z));
  const Vec2 id = a.inverse().apply(a.apply(p));
  CHECK(id.x == doctest::Approx(p.x));
  CHECK(id.z == doctest::Approx(p.z));
}

TEST_CASE("friction cone edges") {
  const FrictionCone c0 = friction_cone({0, 1}, 0.0);
  CHECK(c0.edge1.x == doctest::Approx(0.0));
  CHECK(c0.edge2.z == doctest::Approx(1.0));

  const FrictionCone c1 = friction_cone({0, 1}, 1.0);
  const double h = std::sqrt(2.0) / 2.0;
  CHECK(std::abs(c1.edge1.x) == doctest::Approx(h));
  CHECK(c1.edge1.z == doctest::Approx(h));
  CHECK(c1.edge1.x == doctest::Approx(-c1.edge2.x));

  const FrictionCone c2 = friction_cone({1, 0}, 0.5);
  const double half_angle = std::atan2(1.0, 2.0);  // tan = 1/2
  CHECK(std::abs(std::atan2(c2.edge1.z, c2.edge1.x)) == doctest::Approx(half_angle));
  CHECK(std::abs(std::atan2(c2.edge2.z, c2.edge2.x)) == doctest::Approx(half_angle));
  CHECK(c2.edge1.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(friction_cone({0, 1}, -0.1), ValidationError);
}

TEST_CASE("segment distances") {
  const Segment2 s({0, 0}, {1, 0});
  CHECK(distance_point_segment({0.5, 0.3}, s) == doctest::Approx(0.3));
  CHECK(distance_point_segment({2.0, 0.0}, s) == doctest::Approx(1.0));
  CHECK(segments_intersect(s, Segment2({0.5, -1}, {0.5, 1})));
  CHECK_FALSE(segments_intersect(s, Segment2({0.5, 0.1}, {0.5, 1})));
  CHECK(distance_segment_segment(s, Segment2({0.5, 0.1}, {0.5, 1})) == doctest::Approx(0.1));
}

}  // TEST_SUITE

TEST_SUITE("lp") {

TEST_CASE("simplex solves a small program") {
  // minimize -x0 - x1 subject to x0 + x2 = 1, x1 + x3 = 2
  lp::Matrix A(2, 4);
  A(0, 0) = 1;
  A(0, 2) = 1;
  A(1, 1) = 1;
  A(1, 3) = 1;
  const std::vector<double> b{1, 2};
  const std::vector<double> c{-1, -1, 0, 0};
  const lp::Result r = lp::solve(A, b, c);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(-3.0));
}

TEST_CASE("infeasible system") {
  lp::Matrix A(1, 2);
  A(0, 0) = 1;
  A(0, 1) = 1;
  const std::vector<double> b{-1};
  CHECK_FALSE(lp::feasible(A, b));
}

TEST_CASE("feasibility agrees with basic-solution enumeration") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    const int rows = 3;
    const int cols = 2 + static_cast<int>(rng() % 6);
    lp::Matrix A(rows, cols);
    std::vector<std::vector<double>> oc(static_cast<std::size_t>(cols), std::vector<double>(rows));
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        A(i, j) = g(rng);
        oc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = A(i, j);
      }
    }
    std::vector<double> b{g(rng), g(rng), g(rng)};
    CHECK(lp::feasible(A, b) == oracle::cone_contains(oc, b));
  }
}

}  // TEST_SUITE
