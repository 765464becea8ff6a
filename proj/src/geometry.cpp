#include "drape/geometry.hpp"

#include <algorithm>
#include <limits>

namespace drape {

namespace {

double segment_distance(Vec2 a, Vec2 b, Vec2 p, Vec2 *closest) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * d;
  if (closest)
    *closest = q;
  return distance(p, q);
}

Vec2 inward_normal(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len = norm(d);
  return {-d.y / len, d.x / len};
}

} // namespace

ConvexHull convex_hull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3)
    return {pts};

  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2 &p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    const Vec2 &p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return {hull};
}

double outside_distance(const ConvexHull &hull, Vec2 p) {
  const auto &v = hull.vertices;
  const std::size_t n = v.size();
  if (n == 0)
    return std::numeric_limits<double>::infinity();
  if (n == 1)
    return distance(v[0], p);
  if (n == 2)
    return segment_distance(v[0], v[1], p, nullptr);

  bool inside = true;
  for (std::size_t i = 0; i < n && inside; ++i)
    if (cross(v[(i + 1) % n] - v[i], p - v[i]) < 0.0)
      inside = false;
  if (inside)
    return 0.0;

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, segment_distance(v[i], v[(i + 1) % n], p, nullptr));
  return best;
}

Vec2 project_to_boundary(const ConvexHull &hull, Vec2 p) {
  const auto &v = hull.vertices;
  const std::size_t n = v.size();
  if (n == 0)
    return p;
  if (n == 1)
    return v[0];
  Vec2 best_point = v[0];
  double best = std::numeric_limits<double>::infinity();
  const std::size_t edges = n == 2 ? 1 : n;
  for (std::size_t i = 0; i < edges; ++i) {
    Vec2 q;
    const double d = segment_distance(v[i], v[(i + 1) % n], p, &q);
    if (d < best) {
      best = d;
      best_point = q;
    }
  }
  return best_point;
}

Vec2 pull_inside(const ConvexHull &hull, Vec2 p, double margin) {
  if (outside_distance(hull, p) == 0.0)
    return p;
  const Vec2 q = project_to_boundary(hull, p);
  if (hull.degenerate() || margin <= 0.0)
    return q;

  const auto &v = hull.vertices;
  const std::size_t n = v.size();
  constexpr double kVertexTol = 1e-12;
  Vec2 normal{};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % n];
    if (segment_distance(a, b, q, nullptr) <= kVertexTol)
      normal += inward_normal(a, b);
  }
  const double len = norm(normal);
  if (len == 0.0)
    return q;
  const Vec2 moved = q + (margin / len) * normal;
  return outside_distance(hull, moved) == 0.0 ? moved : q;
}

} // namespace drape
