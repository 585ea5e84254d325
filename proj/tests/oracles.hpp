#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "f1grasp/geometry.hpp"

namespace oracle {

using f1grasp::Vec2;

inline double edge_side(const Vec2& a, const Vec2& b, const Vec2& p) {
  return (b.x - a.x) * (p.z - a.z) - (b.z - a.z) * (p.x - a.x);
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double dx = b.x - a.x, dz = b.z - a.z;
  const double len2 = dx * dx + dz * dz;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.z - a.z) * dz) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.z - (a.z + t * dz));
}

/// Signed distance to a counter-clockwise convex polygon, negative inside.
inline double convex_signed_distance(const std::vector<Vec2>& v, const Vec2& p) {
  bool inside = true;
  double d = 1e300;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    if (edge_side(a, b, p) < 0.0) inside = false;
    d = std::min(d, point_segment_distance(p, a, b));
  }
  return inside ? -d : d;
}

/// Random convex polygon: vertices on a circle at sorted random angles.
inline std::vector<Vec2> random_convex(std::mt19937_64& rng, Vec2 center, double radius, int n) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * f1grasp::kPi);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (double& x : a) x = ang(rng);
  std::sort(a.begin(), a.end());
  std::vector<Vec2> out;
  for (double t : a) out.push_back({center.x + radius * std::cos(t), center.z + radius * std::sin(t)});
  return out;
}

/// Solves the least-squares system on the chosen columns by Gaussian elimination on the normal
/// equations. Returns false when the columns are dependent.
inline bool solve_subset(const std::vector<std::vector<double>>& cols, const std::vector<int>& pick,
                         const std::vector<double>& b, std::vector<double>& x) {
  const std::size_t k = pick.size();
  std::vector<std::vector<double>> m(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t r = 0; r < b.size(); ++r) m[i][j] += cols[pick[i]][r] * cols[pick[j]][r];
    }
    for (std::size_t r = 0; r < b.size(); ++r) m[i][k] += cols[pick[i]][r] * b[r];
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) < 1e-12) return false;
    std::swap(m[c], m[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[c][j];
    }
  }
  x.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) x[i] = m[i][k] / m[i][i];
  return true;
}

/// Is b a non-negative combination of the columns? Enumerates every column subset of size up to
/// the row count (a feasible system always has a basic solution on such a subset).
inline bool cone_contains(const std::vector<std::vector<double>>& cols, const std::vector<double>& b) {
  const int n = static_cast<int>(cols.size());
  const int rows = static_cast<int>(b.size());
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  std::vector<int> pick;
  std::vector<double> x;
  bool found = false;
  auto check = [&]() {
    if (!solve_subset(cols, pick, b, x)) return;
    for (double v : x)
      if (v < -1e-9 * scale) return;
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < pick.size(); ++i) s += cols[pick[i]][r] * x[i];
      if (std::abs(s - b[r]) > 1e-7 * scale) return;
    }
    found = true;
  };
  auto recurse = [&](auto&& self, int start) -> void {
    if (found) return;
    if (!pick.empty()) check();
    if (static_cast<int>(pick.size()) == rows) return;
    for (int i = start; i < n && !found; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  bool zero = true;
  for (double v : b) zero = zero && std::abs(v) < 1e-12;
  if (zero) return true;
  recurse(recurse, 0);
  return found;
}

/// Friction cone edges about `normal`, rotated by -/+ atan(mu).
inline std::array<Vec2, 2> cone_edges(const Vec2& normal, double mu) {
  const double a = std::atan(mu);
  const double c = std::cos(a), s = std::sin(a);
  return {Vec2{normal.x * c + normal.z * s, -normal.x * s + normal.z * c},
          Vec2{normal.x * c - normal.z * s, normal.x * s + normal.z * c}};
}

/// Wrench column (fx, fz, torque about c) of a unit force e at p.
inline std::vector<double> wrench(const Vec2& p, const Vec2& c, const Vec2& e) {
  return {e.x, e.z, (p.x - c.x) * e.z - (p.z - c.z) * e.x};
}

/// Area centroid of a simple polygon by the shoelace formula.
inline Vec2 area_centroid(const std::vector<Vec2>& v) {
  double a = 0.0, cx = 0.0, cz = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    const double w = p.x * q.z - q.x * p.z;
    a += w;
    cx += (p.x + q.x) * w;
    cz += (p.z + q.z) * w;
  }
  return {cx / (3.0 * a), cz / (3.0 * a)};
}

struct LiftInstance {
  std::vector<Vec2> vertices;
  std::vector<f1grasp::ContactPoint> contacts;
  double mass = 0.1;
  double mu = 0.5;
};

/// Random convex object with 2-4 finger contacts on its boundary; normals are the inward edge
/// normals tilted by up to 25 degrees.
inline LiftInstance random_lift_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  LiftInstance in;
  const int nv = 3 + static_cast<int>(rng() % 6);
  in.vertices = random_convex(rng, {0.0, 0.03}, 0.01 + 0.03 * u01(rng), nv);
  in.mass = 0.01 + 0.5 * u01(rng);
  in.mu = 0.1 + 1.1 * u01(rng);
  const int nc = 2 + static_cast<int>(rng() % 3);
  for (int k = 0; k < nc; ++k) {
    const std::size_t e = rng() % in.vertices.size();
    const Vec2 a = in.vertices[e];
    const Vec2 b = in.vertices[(e + 1) % in.vertices.size()];
    const double t = u01(rng);
    const Vec2 d = (b - a).normalized();
    const Vec2 inward{-d.z, d.x};
    f1grasp::ContactPoint c;
    c.position = a + (b - a) * t;
    c.normal = f1grasp::rotate(inward, (u01(rng) - 0.5) * 50.0 * f1grasp::kPi / 180.0);
    c.body_pair = {k == 0 ? f1grasp::Body::fixed_finger : f1grasp::Body::distal, f1grasp::Body::object};
    in.contacts.push_back(c);
  }
  return in;
}

/// Can finger forces inside friction cones of coefficient `mu` hold the object against gravity?
inline bool lift_oracle(const LiftInstance& in, double mu) {
  const Vec2 c = area_centroid(in.vertices);
  std::vector<std::vector<double>> cols;
  for (const f1grasp::ContactPoint& cp : in.contacts) {
    for (const Vec2& e : cone_edges(cp.normal, mu)) cols.push_back(wrench(cp.position, c, e));
  }
  return cone_contains(cols, {0.0, in.mass * f1grasp::kGravity, 0.0});
}

/// Oracle verdict with cases that flip under a 1% change of mu reported as boundary (-1).
inline int lift_verdict(const LiftInstance& in) {
  const bool lo = lift_oracle(in, in.mu * 0.99);
  const bool hi = lift_oracle(in, in.mu * 1.01);
  if (lo != hi) return -1;
  return lo ? 1 : 0;
}

}  // namespace oracle
