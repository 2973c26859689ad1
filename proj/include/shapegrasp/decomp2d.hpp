#pragma once

// Approximate convex decomposition of the 2D mask polygon. Concavity of a
// part is the maximum distance from its boundary vertices to its convex hull
// boundary, normalized by the hull diameter, so thresholds are dimensionless
// and comparable across image resolutions.
//
// Splitting is recursive: find the deepest notch vertex, try a straight cut
// to every boundary vertex visible from it, keep the cut minimizing the worse
// child concavity (ties: shortest cut). Holes are first bridged to the outer
// ring through the shortest mutually visible bridge.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "shapegrasp/contours.hpp"
#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"

namespace shapegrasp {

struct Decomp2DParams {
  double sliver_frac = 0.005;  // parts below this fraction of object area get merged
};

inline double ring_concavity(const Ring& ring) {
  if (ring.size() < 4) return 0.0;
  Ring hull;
  try {
    hull = convex_hull(ring);
  } catch (const DegenerateGeometry&) {
    return 0.0;
  }
  double diam = ring_diameter(hull);
  if (diam <= 0) return 0.0;
  double worst = 0.0;
  for (const Vec2& v : ring) worst = std::max(worst, dist_to_ring_boundary(v, hull));
  return worst / diam;
}

// Concavity of a polygon with holes: hole-ring vertices count against the
// hull of all boundary vertices. Bridging does not move vertices, so the
// value is computed directly over every ring.
inline double concavity_2d(const Polygon& poly) {
  if (poly.rings.empty()) return 0.0;
  if (!poly.has_holes()) return ring_concavity(poly.outer());
  std::vector<Vec2> all;
  for (const Ring& r : poly.rings) all.insert(all.end(), r.begin(), r.end());
  Ring hull;
  try {
    hull = convex_hull(all);
  } catch (const DegenerateGeometry&) {
    return 0.0;
  }
  double diam = ring_diameter(hull);
  if (diam <= 0) return 0.0;
  double worst = 0.0;
  for (const Vec2& v : all) worst = std::max(worst, dist_to_ring_boundary(v, hull));
  return worst / diam;
}

namespace detail {

// True when the open segment a-b stays inside the ring: no proper crossing
// with any edge, no pass-through over another vertex, midpoint interior.
inline bool diagonal_inside(const Ring& ring, std::size_t ia, std::size_t ib) {
  const std::size_t n = ring.size();
  Vec2 a = ring[ia], b = ring[ib];
  if (distance(a, b) < 1e-9) return false;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    if (i == ia || i == ib || j == ia || j == ib) {
      // Edge shares an endpoint index with the diagonal; still reject when the
      // diagonal passes through the far endpoint of that edge.
      continue;
    }
    if (segments_properly_intersect(a, b, ring[i], ring[j])) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == ia || i == ib) continue;
    if (distance(ring[i], a) < 1e-9 || distance(ring[i], b) < 1e-9) continue;  // duplicated bridge vertex
    if (point_on_segment(ring[i], a, b, 1e-9)) return false;
  }
  return point_in_ring((a + b) * 0.5, ring);
}

// Bridge every hole into the outer ring via the shortest mutually visible
// vertex pair, producing a single weakly-simple ring.
inline Ring bridge_holes(const Polygon& poly) {
  Ring merged = poly.outer();
  if (signed_area(merged) < 0) std::reverse(merged.begin(), merged.end());

  std::vector<Ring> holes(poly.rings.begin() + 1, poly.rings.end());
  for (Ring& h : holes)
    if (signed_area(h) > 0) std::reverse(h.begin(), h.end());  // holes CW

  // Bridge nearest holes first for stable, short seams.
  while (!holes.empty()) {
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_hole = 0, best_hv = 0, best_mv = 0;
    bool found = false;

    auto crosses_any = [&](Vec2 a, Vec2 b) {
      auto crosses_ring = [&](const Ring& r) {
        for (std::size_t i = 0, n = r.size(); i < n; ++i) {
          Vec2 p = r[i], q = r[(i + 1) % n];
          if (distance(p, a) < 1e-9 || distance(q, a) < 1e-9 || distance(p, b) < 1e-9 ||
              distance(q, b) < 1e-9)
            continue;
          if (segments_properly_intersect(a, b, p, q)) return true;
        }
        return false;
      };
      if (crosses_ring(merged)) return true;
      for (const Ring& h : holes)
        if (crosses_ring(h)) return true;
      return false;
    };

    for (std::size_t hi = 0; hi < holes.size(); ++hi) {
      for (std::size_t vi = 0; vi < holes[hi].size(); ++vi) {
        for (std::size_t mi = 0; mi < merged.size(); ++mi) {
          double d = distance(holes[hi][vi], merged[mi]);
          if (d >= best_d) continue;
          if (crosses_any(holes[hi][vi], merged[mi])) continue;
          best_d = d;
          best_hole = hi;
          best_hv = vi;
          best_mv = mi;
          found = true;
        }
      }
    }
    if (!found) throw NonSimplePolygon("bridge_holes: no visible bridge found");

    const Ring& hole = holes[best_hole];
    Ring next;
    next.reserve(merged.size() + hole.size() + 2);
    for (std::size_t i = 0; i <= best_mv; ++i) next.push_back(merged[i]);
    for (std::size_t k = 0; k <= hole.size(); ++k)
      next.push_back(hole[(best_hv + k) % hole.size()]);  // wraps back to hole[best_hv]
    for (std::size_t i = best_mv; i < merged.size(); ++i) next.push_back(merged[i]);
    merged = std::move(next);
    holes.erase(holes.begin() + static_cast<std::ptrdiff_t>(best_hole));
  }
  return merged;
}

struct SplitCandidate {
  std::size_t to = 0;
  double worst_child = std::numeric_limits<double>::infinity();
  double cut_len = 0.0;
  bool valid = false;
};

inline void split_ring(const Ring& ring, std::size_t ia, std::size_t ib, Ring& left, Ring& right) {
  const std::size_t n = ring.size();
  left.clear();
  right.clear();
  for (std::size_t k = ia; ; k = (k + 1) % n) {
    left.push_back(ring[k]);
    if (k == ib) break;
  }
  for (std::size_t k = ib; ; k = (k + 1) % n) {
    right.push_back(ring[k]);
    if (k == ia) break;
  }
}

inline void decompose_ring_recursive(const Ring& ring, double gamma, std::vector<Ring>& out) {
  double c = ring_concavity(ring);
  if (c <= gamma || ring.size() < 4) {
    out.push_back(ring);
    return;
  }

  // Notch vertices ordered by depth; the deepest one that admits a cut wins.
  Ring hull = convex_hull(ring);
  const std::size_t n = ring.size();
  std::vector<std::pair<double, std::size_t>> notches;
  for (std::size_t i = 0; i < n; ++i) {
    double d = dist_to_ring_boundary(ring[i], hull);
    if (d > 1e-12) notches.push_back({d, i});
  }
  std::sort(notches.begin(), notches.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  Ring left, right;
  for (const auto& [depth, notch] : notches) {
    SplitCandidate best;
    for (std::size_t off = 2; off + 1 < n; ++off) {
      std::size_t w = (notch + off) % n;
      if (!diagonal_inside(ring, notch, w)) continue;
      split_ring(ring, notch, w, left, right);
      if (left.size() < 3 || right.size() < 3) continue;
      if (ring_area(left) < 1e-9 || ring_area(right) < 1e-9) continue;
      double worst = std::max(ring_concavity(left), ring_concavity(right));
      double len = distance(ring[notch], ring[w]);
      if (worst < best.worst_child - 1e-12 ||
          (std::abs(worst - best.worst_child) <= 1e-12 && len < best.cut_len - 1e-12)) {
        best = {w, worst, len, true};
      }
    }
    if (best.valid) {
      split_ring(ring, notch, best.to, left, right);
      decompose_ring_recursive(left, gamma, out);
      decompose_ring_recursive(right, gamma, out);
      return;
    }
  }

  out.push_back(ring);  // no notch admits a cut (degenerate ring); emit as-is
}

}  // namespace detail

// Decompose a polygon (holes allowed) into approximately convex rings with
// concavity <= gamma. Pixel-level sliver merging happens in
// decompose_mask_2d, not here.
inline std::vector<Polygon> decompose_2d(const Polygon& poly, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("decompose_2d: gamma must lie in (0,1)");
  if (poly.rings.empty() || poly.outer().size() < 3)
    throw NonSimplePolygon("decompose_2d: outer ring must have >= 3 vertices");

  Ring ring = poly.has_holes() ? detail::bridge_holes(poly) : poly.outer();
  if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());

  std::vector<Ring> rings;
  detail::decompose_ring_recursive(ring, gamma, rings);

  std::vector<Polygon> parts;
  parts.reserve(rings.size());
  for (Ring& r : rings) {
    Polygon p;
    p.rings.push_back(std::move(r));
    parts.push_back(std::move(p));
  }
  return parts;
}

// Assign every component pixel to exactly one part. Containment decides the
// owner; pixels on shared cut boundaries (or numerically outside all parts)
// go to the nearest part centroid.
inline std::vector<Part> rasterize_parts(const std::vector<Polygon>& part_polys,
                                         const MaskComponent& comp, int mask_width) {
  std::vector<Part> parts(part_polys.size());
  for (std::size_t i = 0; i < part_polys.size(); ++i) {
    parts[i].outline = part_polys[i].outer();
    parts[i].centroid_px = ring_centroid(parts[i].outline);
  }

  for (int pix : comp.pixels) {
    Vec2 center{pix % mask_width + 0.5, pix / mask_width + 0.5};
    int owner = -1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (point_in_ring(center, parts[i].outline)) {
        owner = static_cast<int>(i);
        break;
      }
    }
    if (owner < 0) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < parts.size(); ++i) {
        double d = distance(center, parts[i].centroid_px);
        if (d < best) {
          best = d;
          owner = static_cast<int>(i);
        }
      }
    }
    parts[owner].pixels.push_back(pix);
  }

  for (Part& p : parts) p.area_px = static_cast<double>(p.pixels.size());
  return parts;
}

namespace detail {

// Pixel-adjacency sliver merge: parts below sliver_frac of the object area
// are absorbed by their largest 8-connected neighbor.
inline void merge_slivers(std::vector<Part>& parts, int width, int height, double sliver_frac) {
  double total = 0.0;
  for (const Part& p : parts) total += p.area_px;
  if (total <= 0) return;

  bool changed = true;
  while (changed && parts.size() > 1) {
    changed = false;
    std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (int pix : parts[i].pixels) owner[pix] = static_cast<int>(i);

    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].area_px >= sliver_frac * total) continue;
      // Largest 8-connected neighbor.
      std::vector<double> contact(parts.size(), 0.0);
      for (int pix : parts[i].pixels) {
        int x = pix % width, y = pix / width;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (!dx && !dy) continue;
            int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
            int o = owner[ny * width + nx];
            if (o >= 0 && o != static_cast<int>(i)) contact[o] += 1.0;
          }
      }
      int target = -1;
      double target_area = -1.0;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (j == i || contact[j] <= 0) continue;
        if (parts[j].area_px > target_area) {
          target_area = parts[j].area_px;
          target = static_cast<int>(j);
        }
      }
      if (target < 0) {
        for (std::size_t j = 0; j < parts.size(); ++j) {
          if (j == i) continue;
          if (parts[j].area_px > target_area) {
            target_area = parts[j].area_px;
            target = static_cast<int>(j);
          }
        }
      }
      if (target < 0) continue;

      Part& dst = parts[target];
      Part& src = parts[i];
      dst.pixels.insert(dst.pixels.end(), src.pixels.begin(), src.pixels.end());
      std::sort(dst.pixels.begin(), dst.pixels.end());
      std::vector<Vec2> verts(dst.outline.begin(), dst.outline.end());
      verts.insert(verts.end(), src.outline.begin(), src.outline.end());
      try {
        dst.outline = convex_hull(verts);
      } catch (const DegenerateGeometry&) {
        // keep destination outline
      }
      dst.centroid_px = ring_centroid(dst.outline);
      dst.area_px = static_cast<double>(dst.pixels.size());
      parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }
}

}  // namespace detail

// Full 2D route for one mask component: bridge holes, split recursively,
// rasterize pixel ownership, merge slivers.
inline std::vector<Part> decompose_mask_2d(const MaskComponent& comp, int width, int height,
                                           double gamma, const Decomp2DParams& params = {}) {
  std::vector<Polygon> polys = decompose_2d(comp.polygon, gamma);
  std::vector<Part> parts = rasterize_parts(polys, comp, width);
  detail::merge_slivers(parts, width, height, params.sliver_frac);
  // Drop empty parts (possible when a cut produced a degenerate region).
  std::erase_if(parts, [](const Part& p) { return p.pixels.empty(); });
  for (Part& p : parts) p.area_px = static_cast<double>(p.pixels.size());
  return parts;
}

}  // namespace shapegrasp
