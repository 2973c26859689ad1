#pragma once

// Primitive fitting and node attributes. Each approximately convex part is
// abstracted as one of: circle, rectangle, isosceles triangle, or ellipse.
// Dispatch order: shape factor >= 0.9 classifies a circle; a simplification
// that collapses to three vertices yields a triangle; otherwise the
// minimum-area rectangle competes against its inscribed ellipse on mean
// boundary error.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"
#include "shapegrasp/image.hpp"

namespace shapegrasp {

struct CirclePrim {
  Vec2 center;
  double radius = 0.0;
};

struct RectanglePrim {
  Vec2 center;
  double long_side = 0.0;
  double short_side = 0.0;
  double angle_deg = 0.0;  // direction of the long side, [0,180)
};

struct TrianglePrim {  // isosceles
  Vec2 apex;
  Vec2 base_mid;
  double leg = 0.0;
  double base = 0.0;
};

struct EllipsePrim {
  Vec2 center;
  double major = 0.0;  // full axis lengths
  double minor = 0.0;
  double angle_deg = 0.0;  // direction of the major axis, [0,180)
};

using ShapePrimitive = std::variant<CirclePrim, RectanglePrim, TrianglePrim, EllipsePrim>;

inline const char* shape_name(const ShapePrimitive& p) {
  struct V {
    const char* operator()(const CirclePrim&) const { return "circle"; }
    const char* operator()(const RectanglePrim&) const { return "rectangle"; }
    const char* operator()(const TrianglePrim&) const { return "isosceles_triangle"; }
    const char* operator()(const EllipsePrim&) const { return "ellipse"; }
  };
  return std::visit(V{}, p);
}

// Ratio of the part's area to the area of its minimum enclosing circle.
inline double shape_factor(const Ring& outline) {
  double area = ring_area(outline);
  Circle c = min_enclosing_circle(outline);
  if (c.radius <= 0) return 1.0;
  return area / (M_PI * c.radius * c.radius);
}

namespace detail {

// Unsigned distance from a point to the rectangle outline.
inline double rect_boundary_distance(const RectanglePrim& r, Vec2 p) {
  double ang = r.angle_deg * M_PI / 180.0;
  Vec2 dir{std::cos(ang), std::sin(ang)};
  Vec2 nrm = perp(dir);
  Vec2 d = p - r.center;
  double u = std::abs(dot(d, dir));
  double v = std::abs(dot(d, nrm));
  double hx = 0.5 * r.long_side, hy = 0.5 * r.short_side;
  double dx = u - hx, dy = v - hy;
  if (dx > 0 || dy > 0) return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  return std::min(-dx, -dy);
}

// Unsigned distance from a point to an axis-aligned ellipse boundary with
// semi-axes a >= b, point given in the ellipse frame. Robust bisection on the
// standard parameterization.
inline double ellipse_boundary_distance_canonical(double a, double b, double px, double py) {
  px = std::abs(px);
  py = std::abs(py);
  if (a <= 0 || b <= 0) return std::hypot(px, py);

  if (px < 1e-12 && py < 1e-12) return b;  // center: nearest boundary is the minor apex
  // Points exactly on the major axis sit on the branch cut of the root
  // equation; nudge them off-axis (error ~1e-9 * b).
  py = std::max(py, 1e-9 * b);

  // F(t) = (a*px/(t+a^2))^2 + (b*py/(t+b^2))^2 - 1 is strictly decreasing for
  // t > -b^2; its root gives the closest boundary point.
  auto F = [&](double t) {
    double fx = a * px / (t + a * a);
    double fy = b * py / (t + b * b);
    return fx * fx + fy * fy - 1.0;
  };
  double lo = -b * b + 1e-12, hi = std::max(a * px + a * a, b * py + b * b) + 1.0;
  while (F(hi) > 0) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  double qx = a * a * px / (t + a * a);
  double qy = b * b * py / (t + b * b);
  return std::hypot(px - qx, py - qy);
}

inline double ellipse_boundary_distance(const EllipsePrim& e, Vec2 p) {
  double ang = e.angle_deg * M_PI / 180.0;
  Vec2 dir{std::cos(ang), std::sin(ang)};
  Vec2 nrm = perp(dir);
  Vec2 d = p - e.center;
  return ellipse_boundary_distance_canonical(0.5 * e.major, 0.5 * e.minor, dot(d, dir), dot(d, nrm));
}

inline double triangle_boundary_distance(const TrianglePrim& t, Vec2 p) {
  Vec2 base_dir = normalized(perp(t.apex - t.base_mid));
  Vec2 b0 = t.base_mid + base_dir * (0.5 * t.base);
  Vec2 b1 = t.base_mid - base_dir * (0.5 * t.base);
  return std::min({point_segment_distance(p, b0, b1), point_segment_distance(p, b0, t.apex),
                   point_segment_distance(p, b1, t.apex)});
}

}  // namespace detail

inline double boundary_distance(const ShapePrimitive& prim, Vec2 p) {
  struct V {
    Vec2 p;
    double operator()(const CirclePrim& c) const { return std::abs(distance(p, c.center) - c.radius); }
    double operator()(const RectanglePrim& r) const { return detail::rect_boundary_distance(r, p); }
    double operator()(const TrianglePrim& t) const { return detail::triangle_boundary_distance(t, p); }
    double operator()(const EllipsePrim& e) const { return detail::ellipse_boundary_distance(e, p); }
  };
  return std::visit(V{p}, prim);
}

// Mean unsigned distance from the part outline's vertices to the primitive
// boundary; the comparison metric between rectangle and ellipse candidates.
inline double mean_boundary_error(const ShapePrimitive& prim, const Ring& outline) {
  if (outline.empty()) return 0.0;
  double acc = 0.0;
  for (const Vec2& v : outline) acc += boundary_distance(prim, v);
  return acc / static_cast<double>(outline.size());
}

namespace detail {

// Isosceles triangle from three simplified vertices: the base is the side
// whose adjacent sides differ least in length; both legs become their mean by
// moving the apex along the base's perpendicular bisector, preserving area.
inline TrianglePrim isosceles_from(const std::array<Vec2, 3>& v) {
  double best_diff = std::numeric_limits<double>::infinity();
  int base_i = 0;
  for (int i = 0; i < 3; ++i) {
    Vec2 a = v[(i + 1) % 3], b = v[(i + 2) % 3], apex = v[i];
    double diff = std::abs(distance(apex, a) - distance(apex, b));
    if (diff < best_diff) {
      best_diff = diff;
      base_i = i;
    }
  }
  Vec2 apex = v[base_i];
  Vec2 b0 = v[(base_i + 1) % 3], b1 = v[(base_i + 2) % 3];
  double base_len = distance(b0, b1);
  Vec2 mid = (b0 + b1) * 0.5;
  double area = 0.5 * std::abs(cross(b1 - b0, apex - b0));
  double height = base_len > 1e-12 ? 2.0 * area / base_len : distance(apex, mid);
  Vec2 n = normalized(perp(b1 - b0));
  if (dot(apex - mid, n) < 0) n = n * -1.0;

  TrianglePrim t;
  t.base_mid = mid;
  t.apex = mid + n * height;
  t.base = base_len;
  t.leg = std::hypot(height, 0.5 * base_len);
  return t;
}

}  // namespace detail

struct FitParams {
  double circle_shape_factor = 0.9;
  double epsilon_pct = 2.0;  // simplification epsilon as % of hull perimeter
};

inline ShapePrimitive fit_primitive(const Ring& outline, const FitParams& params = {}) {
  if (outline.size() < 3) throw DegenerateGeometry("fit_primitive: outline needs >= 3 vertices");

  if (shape_factor(outline) >= params.circle_shape_factor) {
    Circle c = min_enclosing_circle(outline);
    return CirclePrim{c.center, c.radius};
  }

  Ring hull;
  try {
    hull = convex_hull(outline);
  } catch (const DegenerateGeometry&) {
    hull = outline;
  }
  double eps = params.epsilon_pct / 100.0 * ring_perimeter(hull);
  Ring simplified = simplify_ring(hull, std::max(eps, 1e-6));

  if (simplified.size() == 3) {
    return detail::isosceles_from({simplified[0], simplified[1], simplified[2]});
  }

  RotatedRect rect = min_area_rect(outline);
  RectanglePrim rect_prim{rect.center, rect.length, rect.width, rect.angle_deg};
  EllipsePrim ell_prim{rect.center, rect.length, rect.width, rect.angle_deg};
  double rect_err = mean_boundary_error(ShapePrimitive{rect_prim}, outline);
  double ell_err = mean_boundary_error(ShapePrimitive{ell_prim}, outline);
  if (ell_err < rect_err) return ell_prim;
  return rect_prim;
}

// The 16 standard web colors, used to bucket part color.
struct WebColor {
  const char* name;
  std::uint8_t r, g, b;
};

inline const std::array<WebColor, 16>& web_palette() {
  static const std::array<WebColor, 16> palette = {{
      {"aqua", 0, 255, 255},
      {"black", 0, 0, 0},
      {"blue", 0, 0, 255},
      {"fuchsia", 255, 0, 255},
      {"gray", 128, 128, 128},
      {"green", 0, 128, 0},
      {"lime", 0, 255, 0},
      {"maroon", 128, 0, 0},
      {"navy", 0, 0, 128},
      {"olive", 128, 128, 0},
      {"purple", 128, 0, 128},
      {"red", 255, 0, 0},
      {"silver", 192, 192, 192},
      {"teal", 0, 128, 128},
      {"white", 255, 255, 255},
      {"yellow", 255, 255, 0},
  }};
  return palette;
}

inline std::string nearest_web_color(Rgb c) {
  // Palette is kept in lexicographic order, so the first minimum is also the
  // lexicographically smallest on distance ties.
  double best = std::numeric_limits<double>::infinity();
  const char* name = "black";
  for (const WebColor& w : web_palette()) {
    double dr = double(c.r) - w.r, dg = double(c.g) - w.g, db = double(c.b) - w.b;
    double d = dr * dr + dg * dg + db * db;
    if (d < best) {
      best = d;
      name = w.name;
    }
  }
  return name;
}

// Modal nearest-palette color over the part's pixels; ties resolve to the
// lexicographically smallest name.
inline std::string dominant_color(const std::vector<int>& pixels, const RgbImage& rgb) {
  if (pixels.empty()) throw DegeneratePart("dominant_color: part has no pixels");
  std::map<std::string, std::size_t> counts;
  for (int pix : pixels) counts[nearest_web_color(rgb.data[pix])]++;
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;  // map order = lexicographic tie-break
  return best->first;
}

struct NodeAttributes {
  ShapePrimitive shape;
  Vec2 centroid_px;
  double area_pct = 0.0;
  double aspect_ratio = 1.0;
  std::optional<double> angle_deg;  // absent for circles
  std::string color;
  double width_px = 0.0;  // short extent, for the gripper-width constraint
  std::map<std::string, std::string> extra;
};

inline NodeAttributes node_attributes(const Part& part, const ShapePrimitive& prim,
                                      const RgbImage& rgb, double total_area_px) {
  NodeAttributes a;
  a.shape = prim;
  a.centroid_px = part.centroid_px;
  a.area_pct = total_area_px > 0 ? 100.0 * part.area_px / total_area_px : 0.0;
  a.color = dominant_color(part.pixels, rgb);

  struct V {
    NodeAttributes& a;
    void operator()(const CirclePrim& c) const {
      a.aspect_ratio = 1.0;
      a.angle_deg.reset();
      a.width_px = 2.0 * c.radius;
    }
    void operator()(const RectanglePrim& r) const {
      a.aspect_ratio = r.short_side > 0 ? r.long_side / r.short_side : 1.0;
      a.angle_deg = r.angle_deg;
      a.width_px = r.short_side;
    }
    void operator()(const TrianglePrim& t) const {
      double height = distance(t.apex, t.base_mid);
      double lo = std::min(t.base, height), hi = std::max(t.base, height);
      a.aspect_ratio = lo > 0 ? hi / lo : 1.0;
      Vec2 axis = t.base >= height ? perp(t.apex - t.base_mid) : (t.apex - t.base_mid);
      a.angle_deg = direction_angle_deg(axis);
      a.width_px = lo;
    }
    void operator()(const EllipsePrim& e) const {
      a.aspect_ratio = e.minor > 0 ? e.major / e.minor : 1.0;
      a.angle_deg = e.angle_deg;
      a.width_px = e.minor;
    }
  };
  std::visit(V{a}, prim);
  return a;
}

}  // namespace shapegrasp
