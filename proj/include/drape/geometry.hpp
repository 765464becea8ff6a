#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace drape {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  constexpr Vec2 &operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Convex polygon stored counter-clockwise (in a y-up sense; orientation is
/// normalized so that cross(edge, p - edge_start) >= 0 for interior p).
/// Fewer than three vertices means the hull is degenerate.
struct ConvexHull {
  std::vector<Vec2> vertices;

  bool degenerate() const { return vertices.size() < 3; }
};

/// Andrew's monotone chain; collinear points on edges are dropped.
ConvexHull convex_hull(std::span<const Vec2> points);

/// Distance from p to the hull when p lies outside, 0 when inside or on the boundary.
double outside_distance(const ConvexHull &hull, Vec2 p);

/// Nearest point on the hull boundary.
Vec2 project_to_boundary(const ConvexHull &hull, Vec2 p);

/// Moves an outside point to the nearest boundary point, then inward by
/// `margin` along the inward normal there. Points already inside are
/// returned unchanged. If the inward step would leave the hull (thin
/// hulls), the boundary point is returned.
Vec2 pull_inside(const ConvexHull &hull, Vec2 p, double margin);

} // namespace drape
