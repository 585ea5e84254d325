#include "f1grasp/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace f1grasp {

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.z, s * v.x + c * v.z};
}

double normalize_angle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Transform2 Transform2::compose(const Transform2& other) const {
  return {rotation + other.rotation, apply(other.translation)};
}

Transform2 Transform2::inverse() const {
  return {-rotation, rotate(-translation, -rotation)};
}

Segment2::Segment2(Vec2 a_, Vec2 b_) : a(a_), b(b_) {
  if (a == b) throw ValidationError("segment endpoints coincide");
}

namespace {

double signed_area_of(std::span<const Vec2> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % v.size()];
    s += cross(p, q);
  }
  return 0.5 * s;
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.z, b.z) <= p.z &&
         p.z <= std::max(a.z, b.z);
}

}  // namespace

bool segments_intersect(const Segment2& s, const Segment2& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

Vec2 closest_point_on_segment(const Segment2& s, const Vec2& p) {
  const Vec2 d = s.b - s.a;
  const double t = std::clamp(dot(p - s.a, d) / dot(d, d), 0.0, 1.0);
  return s.a + d * t;
}

double distance_point_segment(const Vec2& p, const Segment2& s) {
  return (p - closest_point_on_segment(s, p)).norm();
}

double distance_segment_segment(const Segment2& s, const Segment2& t) {
  if (segments_intersect(s, t)) return 0.0;
  return std::min({distance_point_segment(s.a, t), distance_point_segment(s.b, t),
                   distance_point_segment(t.a, s), distance_point_segment(t.b, s)});
}

Polygon2::Polygon2(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
  if (!(signed_area_of(vertices_) > 0.0))
    throw ValidationError("polygon must be counter-clockwise with positive area");
  for (std::size_t i = 0; i < n; ++i) {
    if (vertices_[i] == vertices_[(i + 1) % n]) throw ValidationError("polygon has repeated vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(edge(i), edge(j))) throw ValidationError("polygon is not simple");
    }
  }
}

Polygon2 Polygon2::rectangle(Vec2 min, double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) throw ValidationError("rectangle needs positive size");
  return Polygon2({min, {min.x + width, min.z}, {min.x + width, min.z + height}, {min.x, min.z + height}});
}

Polygon2 Polygon2::regular(Vec2 center, double radius, int sides, double phase) {
  if (sides < 3 || !(radius > 0.0)) throw ValidationError("regular polygon needs >= 3 sides and radius > 0");
  std::vector<Vec2> v;
  v.reserve(static_cast<std::size_t>(sides));
  for (int i = 0; i < sides; ++i) {
    const double a = phase + 2.0 * kPi * i / sides;
    v.push_back({center.x + radius * std::cos(a), center.z + radius * std::sin(a)});
  }
  return Polygon2(std::move(v));
}

Segment2 Polygon2::edge(std::size_t i) const {
  Segment2 s;
  s.a = vertices_[i];
  s.b = vertices_[(i + 1) % vertices_.size()];
  return s;
}

double Polygon2::signed_area() const { return signed_area_of(vertices_); }

Vec2 Polygon2::centroid() const {
  double a = 0.0;
  Vec2 c;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % vertices_.size()];
    const double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  return c * (1.0 / (3.0 * a));
}

bool Polygon2::contains(const Vec2& p) const {
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[j];
    if ((a.z > p.z) != (b.z > p.z)) {
      const double x = (b.x - a.x) * (p.z - a.z) / (b.z - a.z) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double Polygon2::signed_distance(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) d = std::min(d, distance_point_segment(p, edge(i)));
  return contains(p) ? -d : d;
}

double Polygon2::min_x() const {
  return std::min_element(vertices_.begin(), vertices_.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
}
double Polygon2::max_x() const {
  return std::max_element(vertices_.begin(), vertices_.end(), [](auto& a, auto& b) { return a.x < b.x; })->x;
}
double Polygon2::min_z() const {
  return std::min_element(vertices_.begin(), vertices_.end(), [](auto& a, auto& b) { return a.z < b.z; })->z;
}
double Polygon2::max_z() const {
  return std::max_element(vertices_.begin(), vertices_.end(), [](auto& a, auto& b) { return a.z < b.z; })->z;
}

bool Polygon2::is_convex() const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (cross(vertices_[(i + 1) % n] - vertices_[i], vertices_[(i + 2) % n] - vertices_[(i + 1) % n]) < 0.0)
      return false;
  }
  return true;
}

Polygon2 transform_apply(const Transform2& t, const Polygon2& p) {
  std::vector<Vec2> v;
  v.reserve(p.size());
  for (const Vec2& q : p.vertices()) v.push_back(t.apply(q));
  return Polygon2(std::move(v));
}

Segment2 transform_apply(const Transform2& t, const Segment2& s) {
  Segment2 out;
  out.a = t.apply(s.a);
  out.b = t.apply(s.b);
  return out;
}

namespace {
constexpr std::array<const char*, 8> kBodyNames{"table",    "object", "fixed_finger",  "proximal",
                                                "middle",   "distal", "baseline_left", "baseline_right"};
}

const char* to_string(Body b) { return kBodyNames[static_cast<std::size_t>(b)]; }

Body body_from_string(const std::string& s) {
  for (std::size_t i = 0; i < kBodyNames.size(); ++i) {
    if (s == kBodyNames[i]) return static_cast<Body>(i);
  }
  throw ValidationError("unknown body '" + s + "'");
}

ContactPoint ContactPoint::flipped() const {
  ContactPoint c = *this;
  c.normal = -normal;
  std::swap(c.body_pair.first, c.body_pair.second);
  return c;
}

namespace {

struct Nearest {
  Vec2 point;
  std::size_t edge = 0;
  double distance = std::numeric_limits<double>::infinity();
};

Nearest nearest_boundary(const Polygon2& poly, const Vec2& p) {
  Nearest best;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Segment2 e = poly.edge(i);
    const Vec2 q = closest_point_on_segment(e, p);
    const double d = (p - q).norm();
    if (d < best.distance) best = {q, i, d};
  }
  return best;
}

Vec2 inward_edge_normal(const Polygon2& poly, std::size_t i) {
  const Segment2 e = poly.edge(i);
  return perp(e.b - e.a).normalized();
}

bool segment_enters(const Polygon2& poly, const Segment2& seg) {
  if (poly.contains(seg.a) || poly.contains(seg.b)) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Segment2 e = poly.edge(i);
    const int o1 = orientation(seg.a, seg.b, e.a);
    const int o2 = orientation(seg.a, seg.b, e.b);
    const int o3 = orientation(e.a, e.b, seg.a);
    const int o4 = orientation(e.a, e.b, seg.b);
    if (o1 * o2 < 0 && o3 * o4 < 0) return true;  // proper crossing
  }
  // Passing exactly through vertices: test the midpoint of the chord.
  return poly.contains((seg.a + seg.b) * 0.5);
}

}  // namespace

std::vector<ContactPoint> polygon_segment_contact(const Polygon2& poly, const Segment2& seg, double tol) {
  if (!(tol > 0.0)) throw ValidationError("contact tolerance must be positive");
  if (poly.size() < 3) throw ValidationError("degenerate polygon");

  std::vector<ContactPoint> raw;
  const Vec2 d = seg.b - seg.a;
  const double len = d.norm();
  const Vec2 dir = d * (1.0 / len);
  const Vec2 nrm = perp(dir);

  // Segment endpoints touching or inside the polygon.
  for (const Vec2& p : {seg.a, seg.b}) {
    const Nearest nb = nearest_boundary(poly, p);
    const bool inside = poly.contains(p);
    if (!inside && nb.distance > tol) continue;
    ContactPoint c;
    c.position = p;
    c.penetration_depth = inside ? nb.distance : 0.0;
    if (nb.distance > 1e-12) {
      c.normal = inside ? (p - nb.point).normalized() : (nb.point - p).normalized();
    } else {
      c.normal = inward_edge_normal(poly, nb.edge);
    }
    raw.push_back(c);
  }

  // Polygon vertices against the segment body.
  const bool enters = segment_enters(poly, seg);
  std::vector<std::pair<std::size_t, double>> pos_side, neg_side;  // (vertex, signed distance)
  std::vector<std::pair<std::size_t, double>> pos_all, neg_all;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 r = poly[i] - seg.a;
    const double t = dot(r, dir);
    const double sd = dot(r, nrm);
    const bool in_range = t >= 0.0 && t <= len;
    if (sd > 0.0) {
      pos_all.emplace_back(i, sd);
      if (in_range) pos_side.emplace_back(i, sd);
    } else if (sd < 0.0) {
      neg_all.emplace_back(i, sd);
      if (in_range) neg_side.emplace_back(i, sd);
    }
    if (!enters && in_range && std::abs(sd) <= tol) {
      ContactPoint c;
      c.position = poly[i];
      c.penetration_depth = 0.0;
      c.normal = sd >= 0.0 ? nrm : -nrm;
      raw.push_back(c);
    }
  }
  if (!enters) {
    // Vertices touching near (but beyond) the segment ends.
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 r = poly[i] - seg.a;
      const double t = dot(r, dir);
      if (t >= 0.0 && t <= len) continue;
      const Vec2 q = closest_point_on_segment(seg, poly[i]);
      const double dist = (poly[i] - q).norm();
      if (dist <= tol && dist > 1e-12) {
        ContactPoint c;
        c.position = poly[i];
        c.normal = (poly[i] - q).normalized();
        raw.push_back(c);
      }
    }
  } else {
    auto depth_of = [](const std::vector<std::pair<std::size_t, double>>& v) {
      double m = 0.0;
      for (const auto& e : v) m = std::max(m, std::abs(e.second));
      return m;
    };
    const auto& pos = pos_side.empty() ? pos_all : pos_side;
    const auto& neg = neg_side.empty() ? neg_all : neg_side;
    double endpoint_depth = -1.0;
    for (const ContactPoint& c : raw) endpoint_depth = std::max(endpoint_depth, c.penetration_depth);
    const double vertex_depth = std::min(pos.empty() ? 0.0 : depth_of(pos), neg.empty() ? 0.0 : depth_of(neg));
    const bool endpoints_separate = endpoint_depth > 0.0 && endpoint_depth < vertex_depth;
    if (!pos.empty() && !neg.empty() && !endpoints_separate) {
      const bool pos_smaller = depth_of(pos) <= depth_of(neg);
      const auto& side = pos_smaller ? pos : neg;
      const Vec2 push = pos_smaller ? -nrm : nrm;
      for (const auto& [i, sd] : side) {
        ContactPoint c;
        c.position = poly[i];
        c.penetration_depth = std::abs(sd);
        c.normal = push;
        raw.push_back(c);
      }
    }
  }

  // Merge contacts sharing a normal.
  std::vector<ContactPoint> merged;
  std::vector<int> counts;
  for (const ContactPoint& c : raw) {
    bool found = false;
    for (std::size_t k = 0; k < merged.size(); ++k) {
      if ((merged[k].normal - c.normal).norm() < 1e-9) {
        merged[k].position += c.position;
        merged[k].penetration_depth = std::max(merged[k].penetration_depth, c.penetration_depth);
        ++counts[k];
        found = true;
        break;
      }
    }
    if (!found) {
      merged.push_back(c);
      counts.push_back(1);
    }
  }
  for (std::size_t k = 0; k < merged.size(); ++k) {
    merged[k].position = merged[k].position * (1.0 / counts[k]);
    merged[k].body_pair = {Body::object, Body::object};
  }
  std::sort(merged.begin(), merged.end(), [](const ContactPoint& a, const ContactPoint& b) {
    if (a.position.x != b.position.x) return a.position.x < b.position.x;
    if (a.position.z != b.position.z) return a.position.z < b.position.z;
    return std::make_pair(a.normal.x, a.normal.z) < std::make_pair(b.normal.x, b.normal.z);
  });
  return merged;
}

FrictionCone friction_cone(const Vec2& normal, double mu) {
  if (!(mu >= 0.0)) throw ValidationError("friction coefficient must be non-negative");
  const Vec2 n = normal.normalized();
  if (mu == 0.0) return {n, n};
  const double half = std::atan(mu);
  return {rotate(n, -half), rotate(n, half)};
}

}  // namespace f1grasp
