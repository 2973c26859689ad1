#pragma once

// 2D geometry primitives shared by decomposition, shape fitting, and grasp
// estimation. Coordinates are image pixels (x right, y down); a ring with
// positive signed area under the standard shoelace formula is called CCW
// here. Angles are degrees in [0, 180) measured from the +x axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "shapegrasp/errors.hpp"

namespace shapegrasp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double sq_norm(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return n > 0 ? a / n : Vec2{0, 0};
}
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  bool operator==(const Vec3&) const = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }
inline Vec3 normalized(Vec3 a) {
  double n = norm(a);
  return n > 0 ? a / n : Vec3{0, 0, 0};
}

// A ring is an implicitly closed vertex loop (last vertex connects to the
// first). Polygons carry one outer ring (CCW) plus optional hole rings (CW).
using Ring = std::vector<Vec2>;

struct Polygon {
  std::vector<Ring> rings;

  const Ring& outer() const { return rings.front(); }
  Ring& outer() { return rings.front(); }
  bool has_holes() const { return rings.size() > 1; }
  std::size_t hole_count() const { return rings.empty() ? 0 : rings.size() - 1; }
};

inline double signed_area(const Ring& r) {
  double a = 0.0;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    const Vec2& p = r[i];
    const Vec2& q = r[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

inline double ring_area(const Ring& r) { return std::abs(signed_area(r)); }

// Outer area minus hole areas.
inline double polygon_area(const Polygon& poly) {
  if (poly.rings.empty()) return 0.0;
  double a = ring_area(poly.outer());
  for (std::size_t i = 1; i < poly.rings.size(); ++i) a -= ring_area(poly.rings[i]);
  return a;
}

inline double ring_perimeter(const Ring& r) {
  double p = 0.0;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) p += distance(r[i], r[(i + 1) % n]);
  return p;
}

inline Vec2 ring_centroid(const Ring& r) {
  // Area-weighted centroid; falls back to the vertex mean for degenerate rings.
  double a = 0.0;
  Vec2 c{0, 0};
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    const Vec2& p = r[i];
    const Vec2& q = r[(i + 1) % n];
    double w = p.x * q.y - q.x * p.y;
    a += w;
    c.x += (p.x + q.x) * w;
    c.y += (p.y + q.y) * w;
  }
  if (std::abs(a) < 1e-12) {
    Vec2 m{0, 0};
    for (const Vec2& p : r) m = m + p;
    return r.empty() ? m : m / static_cast<double>(r.size());
  }
  return c / (3.0 * a);
}

inline Vec2 polygon_centroid(const Polygon& poly) {
  double total = 0.0;
  Vec2 acc{0, 0};
  for (std::size_t i = 0; i < poly.rings.size(); ++i) {
    double a = ring_area(poly.rings[i]);
    Vec2 c = ring_centroid(poly.rings[i]);
    double w = (i == 0) ? a : -a;
    total += w;
    acc = acc + c * w;
  }
  if (std::abs(total) < 1e-12) return poly.rings.empty() ? Vec2{} : ring_centroid(poly.outer());
  return acc / total;
}

inline double angle_mod180(double deg) {
  double a = std::fmod(deg, 180.0);
  if (a < 0) a += 180.0;
  if (a >= 180.0 - 1e-12) a = 0.0;
  return a;
}

inline double direction_angle_deg(Vec2 d) {
  return angle_mod180(std::atan2(d.y, d.x) * 180.0 / M_PI);
}

// Smallest absolute difference between two angles under the 180-degree
// symmetry of an undirected axis.
inline double axis_angle_diff(double a_deg, double b_deg) {
  double d = std::abs(angle_mod180(a_deg) - angle_mod180(b_deg));
  return std::min(d, 180.0 - d);
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = sq_norm(ab);
  if (len2 < 1e-24) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

inline double dist_to_ring_boundary(Vec2 p, const Ring& r) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = r.size(); i < n; ++i)
    best = std::min(best, point_segment_distance(p, r[i], r[(i + 1) % n]));
  return best;
}

// Crossing-number test. Boundary points are not handled specially; callers
// that care use it on points known to be strictly inside or outside.
inline bool point_in_ring(Vec2 p, const Ring& r) {
  bool inside = false;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    Vec2 a = r[i], b = r[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xs = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xs) inside = !inside;
    }
  }
  return inside;
}

inline bool point_in_polygon(Vec2 p, const Polygon& poly) {
  if (poly.rings.empty() || !point_in_ring(p, poly.outer())) return false;
  for (std::size_t i = 1; i < poly.rings.size(); ++i)
    if (point_in_ring(p, poly.rings[i])) return false;
  return true;
}

namespace detail {
inline int orient_sign(Vec2 a, Vec2 b, Vec2 c, double eps = 1e-9) {
  double v = cross(b - a, c - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}
}  // namespace detail

inline bool point_on_segment(Vec2 p, Vec2 a, Vec2 b, double eps = 1e-9) {
  if (std::abs(cross(b - a, p - a)) > eps * (1.0 + norm(b - a))) return false;
  double t = dot(p - a, b - a);
  return t >= -eps && t <= sq_norm(b - a) + eps;
}

// True when the open segments (a,b) and (c,d) cross at a single interior
// point. Shared endpoints and collinear overlaps do not count.
inline bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  using detail::orient_sign;
  int o1 = orient_sign(a, b, c);
  int o2 = orient_sign(a, b, d);
  int o3 = orient_sign(c, d, a);
  int o4 = orient_sign(c, d, b);
  return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

// Andrew monotone chain. Returns the hull CCW (positive signed area).
// Collinear points on the hull boundary are dropped.
inline Ring convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw DegenerateGeometry("convex_hull: needs >= 3 distinct points");

  auto build = [&](auto begin, auto end) {
    Ring chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 &&
             cross(chain[chain.size() - 1] - chain[chain.size() - 2], *it - chain[chain.size() - 2]) <= 1e-12)
        chain.pop_back();
      chain.push_back(*it);
    }
    return chain;
  };
  Ring lower = build(pts.begin(), pts.end());
  Ring upper = build(pts.rbegin(), pts.rend());
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  if (lower.size() < 3) throw DegenerateGeometry("convex_hull: input is collinear");
  return lower;
}

inline double ring_diameter(const Ring& r) {
  double best = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      best = std::max(best, distance(r[i], r[j]));
  return best;
}

namespace detail {

inline void douglas_peucker(const Ring& pts, std::size_t lo, std::size_t hi, double eps,
                            std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  double worst = -1.0;
  std::size_t worst_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > worst) {
      worst = d;
      worst_i = i;
    }
  }
  if (worst > eps) {
    keep[worst_i] = true;
    douglas_peucker(pts, lo, worst_i, eps, keep);
    douglas_peucker(pts, worst_i, hi, eps, keep);
  }
}

}  // namespace detail

// Douglas-Peucker on a closed ring. The ring is split at vertex 0 and the
// vertex farthest from it, each open chain simplified independently, so every
// original vertex stays within eps of the simplified boundary.
inline Ring simplify_ring(const Ring& ring, double eps) {
  std::size_t n = ring.size();
  if (n <= 3) return ring;

  std::size_t far_i = 1;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    double d = distance(ring[i], ring[0]);
    if (d > far_d) {
      far_d = d;
      far_i = i;
    }
  }

  std::vector<bool> keep(n, false);
  keep[0] = keep[far_i] = true;
  detail::douglas_peucker(ring, 0, far_i, eps, keep);
  // Second chain wraps around; unroll it into a temporary with an index map.
  {
    Ring tail;
    std::vector<std::size_t> idx;
    for (std::size_t i = far_i; i < n; ++i) {
      tail.push_back(ring[i]);
      idx.push_back(i);
    }
    tail.push_back(ring[0]);
    idx.push_back(0);
    std::vector<bool> keep_tail(tail.size(), false);
    keep_tail.front() = keep_tail.back() = true;
    detail::douglas_peucker(tail, 0, tail.size() - 1, eps, keep_tail);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (keep_tail[k]) keep[idx[k]] = true;
  }

  if (std::count(keep.begin(), keep.end(), true) < 3) {
    // Nearly-degenerate ring; keep the vertex farthest from the anchor chord
    // so the result is still a ring.
    double best = -1.0;
    std::size_t extra = (far_i + 1) % n;
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i]) continue;
      double d = point_segment_distance(ring[i], ring[0], ring[far_i]);
      if (d > best) {
        best = d;
        extra = i;
      }
    }
    keep[extra] = true;
  }

  Ring out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(ring[i]);
  return out;
}

inline Polygon simplify_polygon(const Polygon& poly, double eps) {
  if (eps <= 0) throw ConfigError("simplify_polygon: epsilon must be > 0");
  Polygon out;
  for (const Ring& r : poly.rings) out.rings.push_back(simplify_ring(r, eps));
  return out;
}

// Minimum-area enclosing rectangle. `length` is the long side, `width` the
// short side, and `angle_deg` the direction of the long side in [0, 180).
struct RotatedRect {
  Vec2 center;
  double length = 0.0;
  double width = 0.0;
  double angle_deg = 0.0;

  double area() const { return length * width; }
};

inline RotatedRect min_area_rect(const std::vector<Vec2>& points) {
  Ring hull = convex_hull(points);  // throws DegenerateGeometry on collinear input
  double best_area = std::numeric_limits<double>::infinity();
  RotatedRect best;
  for (std::size_t i = 0, n = hull.size(); i < n; ++i) {
    Vec2 dir = normalized(hull[(i + 1) % n] - hull[i]);
    if (norm(dir) == 0) continue;
    Vec2 nrm = perp(dir);
    double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u;
    double lo_v = lo_u, hi_v = -lo_u;
    for (const Vec2& p : hull) {
      double u = dot(p, dir), v = dot(p, nrm);
      lo_u = std::min(lo_u, u);
      hi_u = std::max(hi_u, u);
      lo_v = std::min(lo_v, v);
      hi_v = std::max(hi_v, v);
    }
    double du = hi_u - lo_u, dv = hi_v - lo_v;
    double area = du * dv;
    if (area < best_area) {
      best_area = area;
      double cu = 0.5 * (lo_u + hi_u), cv = 0.5 * (lo_v + hi_v);
      best.center = dir * cu + nrm * cv;
      if (du >= dv) {
        best.length = du;
        best.width = dv;
        best.angle_deg = direction_angle_deg(dir);
      } else {
        best.length = dv;
        best.width = du;
        best.angle_deg = direction_angle_deg(nrm);
      }
    }
  }
  return best;
}

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

namespace detail {

inline Circle circle_from_2(Vec2 a, Vec2 b) {
  return {(a + b) * 0.5, 0.5 * distance(a, b)};
}

inline Circle circle_from_3(Vec2 a, Vec2 b, Vec2 c) {
  double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-12) {
    // Collinear; fall back to the widest pair.
    Circle best = circle_from_2(a, b);
    for (Circle cand : {circle_from_2(a, c), circle_from_2(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  double ax = sq_norm(a), bx = sq_norm(b), cx = sq_norm(c);
  Vec2 center{(ax * (b.y - c.y) + bx * (c.y - a.y) + cx * (a.y - b.y)) / d,
              (ax * (c.x - b.x) + bx * (a.x - c.x) + cx * (b.x - a.x)) / d};
  return {center, distance(center, a)};
}

inline bool in_circle(Vec2 p, const Circle& c) {
  return distance(p, c.center) <= c.radius * (1.0 + 1e-10) + 1e-10;
}

}  // namespace detail

// Welzl's move-to-front algorithm with a fixed shuffle seed so results are
// reproducible across runs.
inline Circle min_enclosing_circle(std::vector<Vec2> pts) {
  if (pts.empty()) throw DegenerateGeometry("min_enclosing_circle: empty input");
  if (pts.size() == 1) return {pts[0], 0.0};
  std::mt19937 rng(0x5347u);
  std::shuffle(pts.begin(), pts.end(), rng);

  using detail::circle_from_2;
  using detail::circle_from_3;
  using detail::in_circle;

  Circle c = circle_from_2(pts[0], pts[1]);
  for (std::size_t i = 2; i < pts.size(); ++i) {
    if (in_circle(pts[i], c)) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (in_circle(pts[j], c)) continue;
      c = circle_from_2(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (in_circle(pts[k], c)) continue;
        c = circle_from_3(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

// Principal axes of a 2D point set: eigen-decomposition of the covariance of
// centered points. Axes are unit length, ordered by descending variance, with
// a deterministic sign convention (non-negative x; if x ~ 0, non-negative y).
// `ambiguous` is set when the top two variances differ by less than 1%.
struct PrincipalAxes2 {
  Vec2 center;
  std::array<Vec2, 2> axes;
  std::array<double, 2> lengths;  // variances
  bool ambiguous = false;

  double angle_deg() const { return direction_angle_deg(axes[0]); }
};

namespace detail {
inline Vec2 sign_normalize(Vec2 v) {
  if (v.x < -1e-9 || (std::abs(v.x) <= 1e-9 && v.y < 0)) return v * -1.0;
  return v;
}
inline Vec3 sign_normalize(Vec3 v) {
  if (v.x < -1e-9) return v * -1.0;
  if (std::abs(v.x) <= 1e-9) {
    if (v.y < -1e-9) return v * -1.0;
    if (std::abs(v.y) <= 1e-9 && v.z < 0) return v * -1.0;
  }
  return v;
}
}  // namespace detail

inline PrincipalAxes2 principal_axes(const std::vector<Vec2>& pts) {
  if (pts.size() < 2) throw DegenerateGeometry("principal_axes: needs >= 2 points");
  Vec2 mean{0, 0};
  for (Vec2 p : pts) mean = mean + p;
  mean = mean / static_cast<double>(pts.size());

  double sxx = 0, sxy = 0, syy = 0;
  for (Vec2 p : pts) {
    Vec2 d = p - mean;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  double inv_n = 1.0 / static_cast<double>(pts.size());
  sxx *= inv_n;
  sxy *= inv_n;
  syy *= inv_n;

  if (sxx + syy < 1e-18) throw DegenerateGeometry("principal_axes: zero covariance");

  double tr = 0.5 * (sxx + syy);
  double det_part = std::sqrt(std::max(0.0, 0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy));
  double l0 = tr + det_part;
  double l1 = std::max(0.0, tr - det_part);

  Vec2 a0;
  if (std::abs(sxy) > 1e-15) {
    a0 = normalized(Vec2{l0 - syy, sxy});
  } else {
    a0 = (sxx >= syy) ? Vec2{1, 0} : Vec2{0, 1};
  }
  a0 = detail::sign_normalize(a0);
  Vec2 a1 = detail::sign_normalize(perp(a0));

  PrincipalAxes2 out;
  out.center = mean;
  out.axes = {a0, a1};
  out.lengths = {l0, l1};
  out.ambiguous = l0 <= 0 || (l0 - l1) < 0.01 * l0;
  return out;
}

struct PrincipalAxes3 {
  Vec3 center;
  std::array<Vec3, 3> axes;
  std::array<double, 3> lengths;
  bool ambiguous = false;
};

// Cyclic Jacobi sweeps on the symmetric 3x3 covariance matrix.
inline PrincipalAxes3 principal_axes(const std::vector<Vec3>& pts) {
  if (pts.size() < 3) throw DegenerateGeometry("principal_axes: needs >= 3 points");
  Vec3 mean{0, 0, 0};
  for (Vec3 p : pts) mean = mean + p;
  mean = mean / static_cast<double>(pts.size());

  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (Vec3 p : pts) {
    Vec3 d = p - mean;
    double v[3] = {d.x, d.y, d.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] += v[i] * v[j];
  }
  double inv_n = 1.0 / static_cast<double>(pts.size());
  for (auto& row : m)
    for (double& x : row) x *= inv_n;

  if (m[0][0] + m[1][1] + m[2][2] < 1e-18)
    throw DegenerateGeometry("principal_axes: zero covariance");

  double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::abs(m[0][1]) + std::abs(m[0][2]) + std::abs(m[1][2]);
    if (off < 1e-15) break;
    for (int p = 0; p < 3; ++p) {
      for (int r = p + 1; r < 3; ++r) {
        if (std::abs(m[p][r]) < 1e-18) continue;
        double theta = 0.5 * std::atan2(2.0 * m[p][r], m[r][r] - m[p][p]);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < 3; ++k) {
          double mp = m[p][k], mr = m[r][k];
          m[p][k] = c * mp - s * mr;
          m[r][k] = s * mp + c * mr;
        }
        for (int k = 0; k < 3; ++k) {
          double mp = m[k][p], mr = m[k][r];
          m[k][p] = c * mp - s * mr;
          m[k][r] = s * mp + c * mr;
          double qp = q[k][p], qr = q[k][r];
          q[k][p] = c * qp - s * qr;
          q[k][r] = s * qp + c * qr;
        }
      }
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return m[a][a] > m[b][b]; });

  PrincipalAxes3 out;
  out.center = mean;
  for (int i = 0; i < 3; ++i) {
    int k = order[i];
    out.lengths[i] = std::max(0.0, m[k][k]);
    out.axes[i] = detail::sign_normalize(normalized(Vec3{q[0][k], q[1][k], q[2][k]}));
  }
  out.ambiguous = out.lengths[0] <= 0 || (out.lengths[0] - out.lengths[1]) < 0.01 * out.lengths[0];
  return out;
}

}  // namespace shapegrasp
