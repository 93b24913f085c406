#pragma once

// Quadrilateral primitives for text-box evaluation.
//
// Coordinates are image pixels: x grows right, y grows down. A Quad lists its
// vertices clockwise as seen on screen, starting at the top-left corner with
// respect to the word's reading direction. In y-down coordinates that
// ordering gives a positive shoelace area, which is the sign convention used
// everywhere below.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "tedeval/error.hpp"

namespace tedeval {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
};

struct Quad {
  std::array<Point, 4> v{};

  friend constexpr bool operator==(const Quad&, const Quad&) = default;
};

// Left-edge midpoint and centroid, the two points the multiline test turns
// between.
struct PivotPoints {
  Point p1;
  Point p2;
};

using Polygon = std::vector<Point>;

// Points this close to a quad edge count as contained.
inline constexpr double kBoundaryEpsilon = 1e-6;

// Default multiline rejection angle in degrees.
inline constexpr double kMultilineAngleDeg = 45.0;

namespace detail {

constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

// Which side of the directed line a->b the point p is on; positive means
// interior for a positively oriented polygon.
constexpr double side(Point a, Point b, Point p) { return cross(b - a, p - a); }

inline double polygon_signed_area(std::span<const Point> poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double distance_to_segment(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Point d = p - (a + ab * t);
  return std::hypot(d.x, d.y);
}

inline int orientation_sign(Point a, Point b, Point c) {
  const double s = side(a, b, c);
  return (s > 0.0) - (s < 0.0);
}

inline bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// True when the closed segments ab and cd share at least one point.
inline bool segments_touch(Point a, Point b, Point c, Point d) {
  const int o1 = orientation_sign(a, b, c);
  const int o2 = orientation_sign(a, b, d);
  const int o3 = orientation_sign(c, d, a);
  const int o4 = orientation_sign(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Sutherland-Hodgman: clips an arbitrary polygon against a convex,
// positively oriented clip polygon.
inline Polygon clip_convex(Polygon subject, std::span<const Point> clip) {
  for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
    const Point a = clip[i];
    const Point b = clip[(i + 1) % clip.size()];
    Polygon input = std::move(subject);
    subject.clear();
    Point prev = input.back();
    double prev_side = side(a, b, prev);
    for (const Point cur : input) {
      const double cur_side = side(a, b, cur);
      if (cur_side >= 0.0) {
        if (prev_side < 0.0) {
          subject.push_back(prev + (cur - prev) * (prev_side / (prev_side - cur_side)));
        }
        subject.push_back(cur);
      } else if (prev_side >= 0.0) {
        subject.push_back(prev + (cur - prev) * (prev_side / (prev_side - cur_side)));
      }
      prev = cur;
      prev_side = cur_side;
    }
  }
  return subject;
}

inline Polygon positively_oriented(const Quad& q) {
  Polygon poly(q.v.begin(), q.v.end());
  if (polygon_signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

// Exact area of a union of convex polygons by vertical slab decomposition.
// Slab borders sit at every vertex and every edge crossing, so inside a slab
// the merged cross-section length is linear in x and the midpoint rule is
// exact.
inline double union_area(std::span<const Polygon> pieces) {
  std::vector<double> xs;
  struct Edge {
    Point a, b;
  };
  std::vector<Edge> edges;
  for (const auto& poly : pieces) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      xs.push_back(poly[i].x);
      edges.push_back({poly[i], poly[(i + 1) % poly.size()]});
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const Point r = edges[i].b - edges[i].a;
      const Point s = edges[j].b - edges[j].a;
      const double denom = cross(r, s);
      if (denom == 0.0) continue;
      const Point qp = edges[j].a - edges[i].a;
      const double t = cross(qp, s) / denom;
      const double u = cross(qp, r) / denom;
      if (t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0) xs.push_back(edges[i].a.x + t * r.x);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<std::pair<double, double>> spans;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    const double width = xs[s + 1] - xs[s];
    if (width <= 0.0) continue;
    const double xm = 0.5 * (xs[s] + xs[s + 1]);
    spans.clear();
    for (const auto& poly : pieces) {
      double lo = INFINITY;
      double hi = -INFINITY;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point a = poly[i];
        const Point b = poly[(i + 1) % poly.size()];
        if (a.x == b.x) continue;
        if (xm < std::min(a.x, b.x) || xm > std::max(a.x, b.x)) continue;
        const double y = a.y + (xm - a.x) * (b.y - a.y) / (b.x - a.x);
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
      if (hi > lo) spans.emplace_back(lo, hi);
    }
    std::sort(spans.begin(), spans.end());
    double length = 0.0;
    double run_lo = 0.0;
    double run_hi = -INFINITY;
    for (const auto& [lo, hi] : spans) {
      if (lo > run_hi) {
        if (run_hi > run_lo) length += run_hi - run_lo;
        run_lo = lo;
        run_hi = hi;
      } else {
        run_hi = std::max(run_hi, hi);
      }
    }
    if (run_hi > run_lo) length += run_hi - run_lo;
    total += width * length;
  }
  return total;
}

}  // namespace detail

// Signed shoelace area via the diagonal cross product, which is bit-identical
// under any cyclic rotation of the vertices and only flips sign on reversal.
inline double signed_area(const Quad& q) {
  return 0.5 * detail::cross(q.v[2] - q.v[0], q.v[3] - q.v[1]);
}

inline bool is_simple(const Quad& q) {
  return !detail::segments_touch(q.v[0], q.v[1], q.v[2], q.v[3]) &&
         !detail::segments_touch(q.v[1], q.v[2], q.v[3], q.v[0]);
}

inline bool is_convex(const Quad& q) {
  int sign = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const int s = detail::orientation_sign(q.v[i], q.v[(i + 1) % 4], q.v[(i + 2) % 4]);
    if (s == 0) continue;
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  return true;
}

// Throws GeometryError unless q is finite, simple, and positively oriented.
inline void validate(const Quad& q) {
  for (const Point& p : q.v) {
    if (!detail::is_finite(p)) throw GeometryError("quad has a non-finite coordinate");
  }
  const double a = signed_area(q);
  if (a == 0.0) throw GeometryError("degenerate quad: zero area");
  if (!is_simple(q)) throw GeometryError("quad is self-intersecting");
  if (a < 0.0) throw GeometryError("quad vertices are not in clockwise order");
}

// Area in square pixels. Orientation-agnostic; throws on zero-area,
// self-intersecting, or non-finite input.
inline double area(const Quad& q) {
  for (const Point& p : q.v) {
    if (!detail::is_finite(p)) throw GeometryError("quad has a non-finite coordinate");
  }
  const double a = std::fabs(signed_area(q));
  if (a == 0.0) throw GeometryError("degenerate quad: zero area");
  if (!is_simple(q)) throw GeometryError("quad is self-intersecting");
  return a;
}

// Splits a quad into positively oriented convex pieces: the quad itself when
// convex, otherwise two triangles cut along the diagonal at the reflex vertex.
inline std::vector<Polygon> convex_pieces(const Quad& q) {
  Polygon poly = detail::positively_oriented(q);
  if (is_convex(q)) return {poly};
  std::size_t reflex = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (detail::side(poly[(i + 3) % 4], poly[i], poly[(i + 1) % 4]) < 0.0) reflex = i;
  }
  const auto at = [&](std::size_t k) { return poly[(reflex + k) % 4]; };
  return {Polygon{at(0), at(1), at(2)}, Polygon{at(2), at(3), at(0)}};
}

inline double intersect_area(const Quad& a, const Quad& b) {
  const double area_a = area(a);
  const double area_b = area(b);
  if (a == b) return area_a;
  double total = 0.0;
  for (const Polygon& pa : convex_pieces(a)) {
    for (const Polygon& pb : convex_pieces(b)) {
      const Polygon clipped = detail::clip_convex(pa, pb);
      total += std::fabs(detail::polygon_signed_area(clipped));
    }
  }
  return std::min({total, area_a, area_b});
}

// Area of `base` covered by the union of `covers`.
inline double covered_area(const Quad& base, std::span<const Quad> covers) {
  const double base_area = area(base);
  std::vector<Polygon> pieces;
  for (const Polygon& pb : convex_pieces(base)) {
    for (const Quad& c : covers) {
      for (const Polygon& pc : convex_pieces(c)) {
        Polygon clipped = detail::clip_convex(pb, pc);
        if (clipped.size() < 3) continue;
        if (detail::polygon_signed_area(clipped) < 0.0) {
          std::reverse(clipped.begin(), clipped.end());
        }
        pieces.push_back(std::move(clipped));
      }
    }
  }
  return std::min(detail::union_area(pieces), base_area);
}

inline bool contains_point(const Quad& q, Point p) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (detail::distance_to_segment(p, q.v[i], q.v[(i + 1) % 4]) <= kBoundaryEpsilon) {
      return true;
    }
  }
  bool inside = false;
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const Point a = q.v[i];
    const Point b = q.v[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

inline PivotPoints pivot_points(const Quad& q) {
  const auto& v = q.v;
  return {
      {(v[0].x + v[3].x) / 2.0, (v[0].y + v[3].y) / 2.0},
      {(v[0].x + v[1].x + v[2].x + v[3].x) / 4.0, (v[0].y + v[1].y + v[2].y + v[3].y) / 4.0},
  };
}

// Angle in degrees, at b's centroid, between the rays toward a's left-edge
// midpoint and a's centroid. Coincident points yield 0.
inline double pair_angle(const Quad& a, const Quad& b) {
  const PivotPoints pa = pivot_points(a);
  const Point pivot = pivot_points(b).p2;
  const Point u = pa.p1 - pivot;
  const Point w = pa.p2 - pivot;
  const double nu = std::hypot(u.x, u.y);
  const double nw = std::hypot(w.x, w.y);
  if (nu < 1e-12 || nw < 1e-12) return 0.0;
  // atan2 keeps precision near 0 and 180 where acos does not.
  const double rad = std::atan2(std::fabs(detail::cross(u, w)), detail::dot(u, w));
  return std::clamp(rad * 180.0 / std::numbers::pi, 0.0, 180.0);
}

// True when any ordered pair of boxes turns through at least the threshold
// angle (folded into [0, 90]).
inline bool is_multiline(std::span<const Quad> boxes, double threshold_deg = kMultilineAngleDeg) {
  if (boxes.size() < 2) throw ContractError("is_multiline needs at least two boxes");
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (i == j) continue;
      const double theta = pair_angle(boxes[i], boxes[j]);
      if (std::fabs(std::min(theta, 180.0 - theta)) >= threshold_deg) return true;
    }
  }
  return false;
}

}  // namespace tedeval
