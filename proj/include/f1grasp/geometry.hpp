#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace f1grasp {

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;
inline constexpr double kDefaultContactTol = 1e-4;

/// Planar vector. x is the horizontal closing axis, z is vertical (up).
struct Vec2 {
  double x = 0.0;
  double z = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
  constexpr Vec2 operator-() const { return {-x, -z}; }
  constexpr Vec2 operator*(double s) const { return {x * s, z * s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, z); }
  Vec2 normalized() const {
    const double n = norm();
    return {x / n, z / n};
  }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.z * b.z; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.z - a.z * b.x; }
/// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2& v) { return {-v.z, v.x}; }

Vec2 rotate(const Vec2& v, double angle);

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Rigid planar motion: p -> R(rotation) p + translation.
struct Transform2 {
  double rotation = 0.0;
  Vec2 translation;

  Transform2() = default;
  Transform2(double rot, Vec2 t) : rotation(normalize_angle(rot)), translation(t) {}

  static Transform2 identity() { return {}; }
  static Transform2 from_translation(Vec2 t) { return {0.0, t}; }

  Vec2 apply(const Vec2& p) const { return rotate(p, rotation) + translation; }
  Vec2 apply_direction(const Vec2& d) const { return rotate(d, rotation); }
  /// (*this) * other: apply other first.
  Transform2 compose(const Transform2& other) const;
  Transform2 inverse() const;
};

struct Segment2 {
  Vec2 a;
  Vec2 b;

  Segment2() = default;
  Segment2(Vec2 a_, Vec2 b_);

  double length() const { return (b - a).norm(); }
  Vec2 direction() const { return (b - a).normalized(); }
};

/// Simple counter-clockwise polygon.
class Polygon2 {
 public:
  Polygon2() = default;
  /// Validates: >= 3 vertices, counter-clockwise (positive signed area), simple.
  explicit Polygon2(std::vector<Vec2> vertices);

  /// Builds an axis-aligned rectangle with its bottom-left corner at `min`.
  static Polygon2 rectangle(Vec2 min, double width, double height);
  /// Regular n-gon approximating a circle.
  static Polygon2 regular(Vec2 center, double radius, int sides, double phase = 0.0);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices_[i]; }
  Segment2 edge(std::size_t i) const;

  double signed_area() const;
  Vec2 centroid() const;
  bool contains(const Vec2& p) const;
  /// Distance to the boundary; negative when p is strictly inside.
  double signed_distance(const Vec2& p) const;
  double min_x() const;
  double max_x() const;
  double min_z() const;
  double max_z() const;
  bool is_convex() const;

 private:
  std::vector<Vec2> vertices_;
};

bool segments_intersect(const Segment2& s, const Segment2& t);
Vec2 closest_point_on_segment(const Segment2& s, const Vec2& p);
double distance_point_segment(const Vec2& p, const Segment2& s);
double distance_segment_segment(const Segment2& s, const Segment2& t);

Polygon2 transform_apply(const Transform2& t, const Polygon2& p);
Segment2 transform_apply(const Transform2& t, const Segment2& s);

/// Identifies the bodies taking part in a contact.
enum class Body : std::uint8_t {
  table,
  object,
  fixed_finger,
  proximal,
  middle,
  distal,
  baseline_left,
  baseline_right,
};

const char* to_string(Body b);
Body body_from_string(const std::string& s);

struct ContactPoint {
  Vec2 position;
  /// Unit normal pointing from the first body into the second.
  Vec2 normal;
  double penetration_depth = 0.0;
  std::pair<Body, Body> body_pair{Body::object, Body::object};

  /// Same contact seen from the other body.
  ContactPoint flipped() const;
};

/// Contacts between a segment and a polygon. Normals point from the segment
/// into the polygon. Contacts sharing a normal are merged into one at their
/// mean position. Ordered by (x, z) of the contact position.
std::vector<ContactPoint> polygon_segment_contact(const Polygon2& poly, const Segment2& seg,
                                                  double tol = kDefaultContactTol);

struct FrictionCone {
  Vec2 edge1;  ///< rotated clockwise from the normal
  Vec2 edge2;  ///< rotated counter-clockwise from the normal
};

/// Polyhedral (two-edge) planar friction cone about `normal`.
FrictionCone friction_cone(const Vec2& normal, double mu);

}  // namespace f1grasp
