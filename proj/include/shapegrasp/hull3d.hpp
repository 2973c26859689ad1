#pragma once

// Quickhull over 3D point sets. Produces triangulated facets with outward
// normals, which is all the decomposition stage needs: inside-distance
// queries and the hull diameter.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"

namespace shapegrasp {

struct HullFace {
  std::array<int, 3> v;  // indices into the input point set
  Vec3 normal;           // outward unit normal
  double offset = 0.0;   // normal . x = offset on the face plane
};

struct Hull3D {
  std::vector<Vec3> points;     // the input points the faces index into
  std::vector<HullFace> faces;
  std::vector<int> vertices;    // unique hull vertex indices

  bool empty() const { return faces.empty(); }

  // Distance from an interior point to the hull surface (0 if on or outside).
  double inside_distance(Vec3 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const HullFace& f : faces) best = std::min(best, f.offset - dot(f.normal, p));
    return std::max(0.0, best);
  }

  double diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      for (std::size_t j = i + 1; j < vertices.size(); ++j)
        best = std::max(best, distance(points[vertices[i]], points[vertices[j]]));
    return best;
  }
};

namespace detail {

struct QhFace {
  std::array<int, 3> v;
  Vec3 normal;
  double offset;
  std::vector<int> outside;  // candidate points above this face
  bool alive = true;
};

inline double plane_dist(const QhFace& f, Vec3 p) { return dot(f.normal, p) - f.offset; }

inline QhFace make_face(const std::vector<Vec3>& pts, int a, int b, int c, Vec3 interior) {
  QhFace f;
  f.v = {a, b, c};
  Vec3 n = cross(pts[b] - pts[a], pts[c] - pts[a]);
  double len = norm(n);
  n = len > 0 ? n / len : Vec3{0, 0, 1};
  double off = dot(n, pts[a]);
  if (dot(n, interior) - off > 0) {  // flip so the interior is below
    std::swap(f.v[1], f.v[2]);
    n = n * -1.0;
    off = -off;
  }
  f.normal = n;
  f.offset = off;
  return f;
}

}  // namespace detail

// Throws DegenerateGeometry when the input has no 3D extent (fewer than four
// non-coplanar points).
inline Hull3D convex_hull_3d(const std::vector<Vec3>& pts) {
  using detail::QhFace;
  const std::size_t n = pts.size();
  if (n < 4) throw DegenerateGeometry("convex_hull_3d: needs >= 4 points");

  // Scale-aware tolerance.
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const Vec3& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double scale = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z, 1e-12});
  const double eps = 1e-9 * scale;

  // Initial simplex: extreme pair, then farthest from their line, then
  // farthest from that plane.
  int i0 = 0, i1 = 0;
  {
    double best = -1.0;
    std::array<int, 6> ext = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < static_cast<int>(n); ++i) {
      const Vec3& p = pts[i];
      if (p.x < pts[ext[0]].x) ext[0] = i;
      if (p.x > pts[ext[1]].x) ext[1] = i;
      if (p.y < pts[ext[2]].y) ext[2] = i;
      if (p.y > pts[ext[3]].y) ext[3] = i;
      if (p.z < pts[ext[4]].z) ext[4] = i;
      if (p.z > pts[ext[5]].z) ext[5] = i;
    }
    for (int a : ext)
      for (int b : ext) {
        double d = distance(pts[a], pts[b]);
        if (d > best) {
          best = d;
          i0 = a;
          i1 = b;
        }
      }
    if (best < eps) throw DegenerateGeometry("convex_hull_3d: all points coincide");
  }
  int i2 = -1;
  {
    double best = eps;
    Vec3 d01 = pts[i1] - pts[i0];
    for (int i = 0; i < static_cast<int>(n); ++i) {
      double d = norm(cross(d01, pts[i] - pts[i0])) / norm(d01);
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (i2 < 0) throw DegenerateGeometry("convex_hull_3d: points are collinear");
  }
  int i3 = -1;
  {
    Vec3 nrm = normalized(cross(pts[i1] - pts[i0], pts[i2] - pts[i0]));
    double best = eps;
    for (int i = 0; i < static_cast<int>(n); ++i) {
      double d = std::abs(dot(nrm, pts[i] - pts[i0]));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (i3 < 0) throw DegenerateGeometry("convex_hull_3d: points are coplanar");
  }

  Vec3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;

  std::vector<QhFace> faces;
  faces.push_back(detail::make_face(pts, i0, i1, i2, interior));
  faces.push_back(detail::make_face(pts, i0, i1, i3, interior));
  faces.push_back(detail::make_face(pts, i0, i2, i3, interior));
  faces.push_back(detail::make_face(pts, i1, i2, i3, interior));

  // Assign candidate points to the first face that sees them.
  for (int i = 0; i < static_cast<int>(n); ++i) {
    for (QhFace& f : faces) {
      if (detail::plane_dist(f, pts[i]) > eps) {
        f.outside.push_back(i);
        break;
      }
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t fi = 0; fi < faces.size(); ++fi)
    if (!faces[fi].outside.empty()) pending.push_back(fi);

  while (!pending.empty()) {
    std::size_t fi = pending.back();
    pending.pop_back();
    if (!faces[fi].alive || faces[fi].outside.empty()) continue;

    // Farthest outside point of this face.
    int apex = faces[fi].outside[0];
    double best = -1.0;
    for (int i : faces[fi].outside) {
      double d = detail::plane_dist(faces[fi], pts[i]);
      if (d > best) {
        best = d;
        apex = i;
      }
    }

    // Collect all visible faces from the apex (flood fill over the face list;
    // with triangulated faces a linear scan is simpler and fast enough here).
    std::vector<std::size_t> visible;
    for (std::size_t k = 0; k < faces.size(); ++k)
      if (faces[k].alive && detail::plane_dist(faces[k], pts[apex]) > eps) visible.push_back(k);
    if (visible.empty()) continue;

    // Horizon = directed edges of visible faces whose twin is not visible.
    struct Edge {
      int a, b;
    };
    std::vector<Edge> horizon;
    auto edge_visible = [&](int a, int b) {
      for (std::size_t k : visible) {
        const auto& v = faces[k].v;
        for (int e = 0; e < 3; ++e) {
          int ea = v[e], eb = v[(e + 1) % 3];
          if (ea == b && eb == a) return true;  // twin edge inside visible set
        }
      }
      return false;
    };
    for (std::size_t k : visible) {
      const auto& v = faces[k].v;
      for (int e = 0; e < 3; ++e) {
        int a = v[e], b = v[(e + 1) % 3];
        if (!edge_visible(a, b)) horizon.push_back({a, b});
      }
    }

    // Gather orphaned candidate points, retire visible faces.
    std::vector<int> orphans;
    for (std::size_t k : visible) {
      orphans.insert(orphans.end(), faces[k].outside.begin(), faces[k].outside.end());
      faces[k].alive = false;
      faces[k].outside.clear();
    }

    for (const Edge& e : horizon) {
      QhFace nf = detail::make_face(pts, e.a, e.b, apex, interior);
      for (int i : orphans) {
        if (i == apex) continue;
        if (detail::plane_dist(nf, pts[i]) > eps) nf.outside.push_back(i);
      }
      faces.push_back(std::move(nf));
      if (!faces.back().outside.empty()) pending.push_back(faces.size() - 1);
    }
  }

  Hull3D hull;
  hull.points = pts;
  std::vector<char> used(n, 0);
  for (const QhFace& f : faces) {
    if (!f.alive) continue;
    hull.faces.push_back({f.v, f.normal, f.offset});
    for (int v : f.v) used[v] = 1;
  }
  for (int i = 0; i < static_cast<int>(n); ++i)
    if (used[i]) hull.vertices.push_back(i);
  return hull;
}

}  // namespace shapegrasp
