#pragma once

// Approximate convex decomposition of the masked point cloud. The cloud is
// voxelized over its bounding box; concavity of a voxel set is the two-sided
// hull deviation, normalized by the hull diameter:
//   forward   max distance from boundary voxels to the hull surface
//   reverse   max distance from hull-surface samples to the occupied set
// The reverse term is what detects cavities (bowls, pockets, elevation
// steps) in 2.5-D depth clouds, where every surface voxel is itself a hull
// extreme and the forward term stays near zero. Splitting is recursive
// binary plane splitting over candidate orientations (3 grid axes, 3 PCA
// axes, and a plane through the deepest cavity feature).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"
#include "shapegrasp/hull3d.hpp"
#include "shapegrasp/scene.hpp"

namespace shapegrasp {

struct VoxelGrid {
  Vec3 origin;                 // min corner, meters
  double voxel_size = 0.0;     // meters
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> occupancy;            // nx*ny*nz
  std::vector<std::vector<int>> point_ids;        // per voxel: cloud point indices
  const PointCloud* cloud = nullptr;

  int index(int ix, int iy, int iz) const { return (iz * ny + iy) * nx + ix; }
  bool in_bounds(int ix, int iy, int iz) const {
    return ix >= 0 && iy >= 0 && iz >= 0 && ix < nx && iy < ny && iz < nz;
  }
  bool occupied(int ix, int iy, int iz) const {
    return in_bounds(ix, iy, iz) && occupancy[index(ix, iy, iz)] != 0;
  }
  Vec3 center_of(int ix, int iy, int iz) const {
    return {origin.x + (ix + 0.5) * voxel_size, origin.y + (iy + 0.5) * voxel_size,
            origin.z + (iz + 0.5) * voxel_size};
  }
  std::array<int, 3> coords_of(int idx) const {
    int ix = idx % nx;
    int iy = (idx / nx) % ny;
    int iz = idx / (nx * ny);
    return {ix, iy, iz};
  }
};

struct VoxelizeParams {
  // 0 selects the automatic size: bounding-box diagonal / 64, clamped.
  double voxel_size = 0.0;
  double min_voxel_size = 0.002;  // 2 mm
  double max_voxel_size = 0.010;  // 10 mm
};

inline VoxelGrid voxelize(const PointCloud& cloud, const VoxelizeParams& params = {}) {
  if (cloud.points.size() < 1) throw DegeneratePointCloud("voxelize: empty cloud");
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const Vec3& p : cloud.points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  double diag = distance(lo, hi);
  double vs = params.voxel_size;
  if (vs <= 0) vs = std::clamp(diag / 64.0, params.min_voxel_size, params.max_voxel_size);

  VoxelGrid g;
  g.origin = lo;
  g.voxel_size = vs;
  g.cloud = &cloud;
  g.nx = std::max(1, static_cast<int>(std::floor((hi.x - lo.x) / vs)) + 1);
  g.ny = std::max(1, static_cast<int>(std::floor((hi.y - lo.y) / vs)) + 1);
  g.nz = std::max(1, static_cast<int>(std::floor((hi.z - lo.z) / vs)) + 1);
  g.occupancy.assign(static_cast<std::size_t>(g.nx) * g.ny * g.nz, 0);
  g.point_ids.assign(g.occupancy.size(), {});

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    int ix = std::clamp(static_cast<int>(std::floor((p.x - lo.x) / vs)), 0, g.nx - 1);
    int iy = std::clamp(static_cast<int>(std::floor((p.y - lo.y) / vs)), 0, g.ny - 1);
    int iz = std::clamp(static_cast<int>(std::floor((p.z - lo.z) / vs)), 0, g.nz - 1);
    int idx = g.index(ix, iy, iz);
    g.occupancy[idx] = 1;
    g.point_ids[idx].push_back(static_cast<int>(i));
  }
  return g;
}

namespace detail {

struct VoxelSet {
  const VoxelGrid* grid;
  std::vector<int> voxels;  // occupied voxel indices, sorted

  std::size_t point_count() const {
    std::size_t n = 0;
    for (int v : voxels) n += grid->point_ids[v].size();
    return n;
  }
};

inline std::vector<int> boundary_voxels(const VoxelSet& set) {
  const VoxelGrid& g = *set.grid;
  std::vector<std::uint8_t> member(g.occupancy.size(), 0);
  for (int v : set.voxels) member[v] = 1;
  std::vector<int> out;
  for (int v : set.voxels) {
    auto [ix, iy, iz] = g.coords_of(v);
    bool boundary = false;
    static constexpr int d[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (const auto& dd : d) {
      int nx = ix + dd[0], ny = iy + dd[1], nz = iz + dd[2];
      if (!g.in_bounds(nx, ny, nz) || !member[g.index(nx, ny, nz)]) {
        boundary = true;
        break;
      }
    }
    if (boundary) out.push_back(v);
  }
  return out;
}

// 1D squared distance transform (Felzenszwalb/Huttenlocher lower envelope).
inline void edt_1d(std::vector<double>& f, std::vector<double>& scratch_d,
                   std::vector<int>& scratch_v, std::vector<double>& scratch_z) {
  const int n = static_cast<int>(f.size());
  scratch_d.resize(n);
  scratch_v.resize(n);
  scratch_z.resize(n + 1);
  int k = 0;
  scratch_v[0] = 0;
  scratch_z[0] = -1e300;
  scratch_z[1] = 1e300;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      int p = scratch_v[k];
      s = ((f[q] + q * double(q)) - (f[p] + p * double(p))) / (2.0 * (q - p));
      if (s > scratch_z[k]) break;
      --k;
    }
    ++k;
    scratch_v[k] = q;
    scratch_z[k] = s;
    scratch_z[k + 1] = 1e300;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (scratch_z[k + 1] < q) ++k;
    int p = scratch_v[k];
    scratch_d[q] = (q - p) * double(q - p) + f[p];
  }
  f = scratch_d;
}

// Squared Euclidean distance (in voxel units) to the nearest member voxel,
// computed over the subset's bounding box.
struct SubsetDistanceField {
  int x0 = 0, y0 = 0, z0 = 0;
  int nx = 0, ny = 0, nz = 0;
  std::vector<double> sq;  // squared distance in voxel units

  double distance_at(int ix, int iy, int iz, double voxel_size) const {
    ix = std::clamp(ix - x0, 0, nx - 1);
    iy = std::clamp(iy - y0, 0, ny - 1);
    iz = std::clamp(iz - z0, 0, nz - 1);
    return std::sqrt(sq[(static_cast<std::size_t>(iz) * ny + iy) * nx + ix]) * voxel_size;
  }
};

inline SubsetDistanceField subset_distance_field(const VoxelSet& set) {
  const VoxelGrid& g = *set.grid;
  SubsetDistanceField f;
  int x1 = 0, y1 = 0, z1 = 0;
  f.x0 = g.nx;
  f.y0 = g.ny;
  f.z0 = g.nz;
  for (int v : set.voxels) {
    auto [ix, iy, iz] = g.coords_of(v);
    f.x0 = std::min(f.x0, ix);
    f.y0 = std::min(f.y0, iy);
    f.z0 = std::min(f.z0, iz);
    x1 = std::max(x1, ix);
    y1 = std::max(y1, iy);
    z1 = std::max(z1, iz);
  }
  f.nx = x1 - f.x0 + 1;
  f.ny = y1 - f.y0 + 1;
  f.nz = z1 - f.z0 + 1;
  f.sq.assign(static_cast<std::size_t>(f.nx) * f.ny * f.nz, 1e300);
  auto at = [&](int x, int y, int z) -> double& {
    return f.sq[(static_cast<std::size_t>(z) * f.ny + y) * f.nx + x];
  };
  for (int v : set.voxels) {
    auto [ix, iy, iz] = g.coords_of(v);
    at(ix - f.x0, iy - f.y0, iz - f.z0) = 0.0;
  }

  std::vector<double> line, sd;
  std::vector<int> sv;
  std::vector<double> sz;
  for (int z = 0; z < f.nz; ++z)
    for (int y = 0; y < f.ny; ++y) {
      line.resize(f.nx);
      for (int x = 0; x < f.nx; ++x) line[x] = at(x, y, z);
      edt_1d(line, sd, sv, sz);
      for (int x = 0; x < f.nx; ++x) at(x, y, z) = line[x];
    }
  for (int z = 0; z < f.nz; ++z)
    for (int x = 0; x < f.nx; ++x) {
      line.resize(f.ny);
      for (int y = 0; y < f.ny; ++y) line[y] = at(x, y, z);
      edt_1d(line, sd, sv, sz);
      for (int y = 0; y < f.ny; ++y) at(x, y, z) = line[y];
    }
  for (int y = 0; y < f.ny; ++y)
    for (int x = 0; x < f.nx; ++x) {
      line.resize(f.nz);
      for (int z = 0; z < f.nz; ++z) line[z] = at(x, y, z);
      edt_1d(line, sd, sv, sz);
      for (int z = 0; z < f.nz; ++z) at(x, y, z) = line[z];
    }
  return f;
}

struct ConcavityResult {
  double concavity = 0.0;
  Vec3 feature_point{0, 0, 0};   // deepest cavity sample or deepest voxel center
  Vec3 feature_normal{0, 0, 1};  // hull face normal at the feature
  bool has_feature = false;
  bool planar = false;
};

inline ConcavityResult voxel_concavity(const VoxelSet& set) {
  ConcavityResult res;
  const VoxelGrid& g = *set.grid;
  std::vector<int> boundary = boundary_voxels(set);
  if (boundary.size() < 4) return res;

  std::vector<Vec3> pts;
  pts.reserve(boundary.size());
  for (int v : boundary) {
    auto [ix, iy, iz] = g.coords_of(v);
    pts.push_back(g.center_of(ix, iy, iz));
  }

  Hull3D hull;
  try {
    hull = convex_hull_3d(pts);
  } catch (const DegenerateGeometry&) {
    res.planar = true;  // coplanar or collinear voxel centers: convex by definition
    return res;
  }
  double diam = hull.diameter();
  if (diam <= 0) return res;

  // Forward: boundary voxels far inside the hull.
  double worst = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best_face = std::numeric_limits<double>::infinity();
    Vec3 best_normal{0, 0, 1};
    for (const HullFace& f : hull.faces) {
      double d = f.offset - dot(f.normal, pts[i]);
      if (d < best_face) {
        best_face = d;
        best_normal = f.normal;
      }
    }
    best_face = std::max(0.0, best_face);
    if (best_face > worst) {
      worst = best_face;
      res.feature_point = pts[i];
      res.feature_normal = best_normal;
      res.has_feature = true;
    }
  }

  // Reverse: hull-surface samples far from any occupied voxel.
  SubsetDistanceField field = subset_distance_field(set);
  const double vs = g.voxel_size;
  for (const HullFace& face : hull.faces) {
    Vec3 a = hull.points[face.v[0]];
    Vec3 b = hull.points[face.v[1]];
    Vec3 c = hull.points[face.v[2]];
    double edge = std::max({distance(a, b), distance(b, c), distance(c, a)});
    int steps = std::clamp(static_cast<int>(std::ceil(edge / vs)), 1, 48);
    for (int i = 0; i <= steps; ++i) {
      for (int j = 0; j + i <= steps; ++j) {
        double s = double(i) / steps, t = double(j) / steps;
        Vec3 p = a + (b - a) * s + (c - a) * t;
        int ix = static_cast<int>(std::floor((p.x - g.origin.x) / vs));
        int iy = static_cast<int>(std::floor((p.y - g.origin.y) / vs));
        int iz = static_cast<int>(std::floor((p.z - g.origin.z) / vs));
        double d = field.distance_at(ix, iy, iz, vs);
        if (d > worst) {
          worst = d;
          res.feature_point = p;
          res.feature_normal = face.normal;
          res.has_feature = true;
        }
      }
    }
  }

  res.concavity = std::max(0.0, worst) / diam;
  return res;
}

inline std::vector<Vec3> voxel_centers(const VoxelSet& set) {
  std::vector<Vec3> pts;
  pts.reserve(set.voxels.size());
  for (int v : set.voxels) {
    auto [ix, iy, iz] = set.grid->coords_of(v);
    pts.push_back(set.grid->center_of(ix, iy, iz));
  }
  return pts;
}

inline void decompose_voxels_recursive(const VoxelSet& set, double gamma,
                                       std::size_t min_split_points,
                                       std::vector<std::vector<int>>& out) {
  ConcavityResult c = voxel_concavity(set);
  if (c.concavity <= gamma || set.voxels.size() < 2 || set.point_count() < min_split_points) {
    out.push_back(set.voxels);
    return;
  }

  std::vector<Vec3> centers = voxel_centers(set);
  Vec3 centroid{0, 0, 0};
  for (const Vec3& p : centers) centroid = centroid + p;
  centroid = centroid / static_cast<double>(centers.size());

  std::vector<std::pair<Vec3, Vec3>> candidates;  // (normal, point on plane)
  candidates.push_back({{1, 0, 0}, centroid});
  candidates.push_back({{0, 1, 0}, centroid});
  candidates.push_back({{0, 0, 1}, centroid});
  try {
    PrincipalAxes3 pca = principal_axes(centers);
    for (const Vec3& ax : pca.axes)
      if (norm(ax) > 0.5) candidates.push_back({ax, centroid});
  } catch (const DegenerateGeometry&) {
  }
  if (c.has_feature) {
    // Plane through the cavity feature, oriented by its hull face; also try
    // the axis planes through the feature, which separate elevation steps.
    candidates.push_back({c.feature_normal, c.feature_point});
    candidates.push_back({{1, 0, 0}, c.feature_point});
    candidates.push_back({{0, 1, 0}, c.feature_point});
    candidates.push_back({{0, 0, 1}, c.feature_point});
  }

  double best_worst = std::numeric_limits<double>::infinity();
  std::size_t best_balance = 0;
  std::vector<int> best_a, best_b;
  for (const auto& [normal, anchor] : candidates) {
    double d0 = dot(normal, anchor);
    std::vector<int> side_a, side_b;
    for (std::size_t i = 0; i < set.voxels.size(); ++i) {
      if (dot(normal, centers[i]) - d0 < 0)
        side_a.push_back(set.voxels[i]);
      else
        side_b.push_back(set.voxels[i]);
    }
    if (side_a.empty() || side_b.empty()) continue;
    VoxelSet sa{set.grid, side_a}, sb{set.grid, side_b};
    double worst = std::max(voxel_concavity(sa).concavity, voxel_concavity(sb).concavity);
    std::size_t balance = std::min(side_a.size(), side_b.size());
    if (worst < best_worst - 1e-12 ||
        (std::abs(worst - best_worst) <= 1e-12 && balance > best_balance)) {
      best_worst = worst;
      best_balance = balance;
      best_a = std::move(side_a);
      best_b = std::move(side_b);
    }
  }

  if (best_a.empty() || best_b.empty()) {
    out.push_back(set.voxels);
    return;
  }

  decompose_voxels_recursive({set.grid, std::move(best_a)}, gamma, min_split_points, out);
  decompose_voxels_recursive({set.grid, std::move(best_b)}, gamma, min_split_points, out);
}

}  // namespace detail

inline double concavity_3d(const VoxelGrid& grid) {
  std::vector<int> all;
  for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
    if (grid.occupancy[i]) all.push_back(static_cast<int>(i));
  return detail::voxel_concavity({&grid, std::move(all)}).concavity;
}

struct Decomp3DParams {
  double min_part_frac = 0.01;  // parts below this fraction of points get merged
};

// Decompose the grid into approximately convex voxel/point subsets and map
// them back to cloud points and source pixels.
inline std::vector<Part> decompose_3d(const VoxelGrid& grid, double gamma,
                                      const Decomp3DParams& params = {}) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("decompose_3d: gamma must lie in (0,1)");
  if (!grid.cloud) throw DegeneratePointCloud("decompose_3d: grid has no backing cloud");

  std::vector<int> all;
  for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
    if (grid.occupancy[i]) all.push_back(static_cast<int>(i));
  if (all.empty()) throw DegeneratePointCloud("decompose_3d: empty grid");

  const std::size_t total_points = grid.cloud->points.size();
  const std::size_t min_split_points = static_cast<std::size_t>(
      std::ceil(2.5 * params.min_part_frac * static_cast<double>(total_points)));

  std::vector<std::vector<int>> leaves;
  detail::decompose_voxels_recursive({&grid, std::move(all)}, gamma,
                                     std::max<std::size_t>(min_split_points, 8), leaves);

  // Leaves -> parts (points + pixels).
  std::vector<Part> parts;
  for (const auto& voxels : leaves) {
    Part p;
    for (int v : voxels)
      for (int pid : grid.point_ids[v]) p.point_ids.push_back(pid);
    if (p.point_ids.empty()) continue;
    std::sort(p.point_ids.begin(), p.point_ids.end());
    for (int pid : p.point_ids) p.pixels.push_back(grid.cloud->pixel_of[pid]);
    std::sort(p.pixels.begin(), p.pixels.end());
    p.pixels.erase(std::unique(p.pixels.begin(), p.pixels.end()), p.pixels.end());
    parts.push_back(std::move(p));
  }

  // Merge small parts into the nearest sibling by 3D centroid distance.
  auto centroid3 = [&](const Part& p) {
    Vec3 c{0, 0, 0};
    for (int pid : p.point_ids) c = c + grid.cloud->points[pid];
    return c / static_cast<double>(p.point_ids.size());
  };
  bool changed = true;
  while (changed && parts.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].point_ids.size() >= params.min_part_frac * total_points) continue;
      Vec3 ci = centroid3(parts[i]);
      std::size_t target = i;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (j == i) continue;
        double d = distance(ci, centroid3(parts[j]));
        if (d < best) {
          best = d;
          target = j;
        }
      }
      if (target == i) continue;
      Part& dst = parts[target];
      Part& src = parts[i];
      dst.point_ids.insert(dst.point_ids.end(), src.point_ids.begin(), src.point_ids.end());
      std::sort(dst.point_ids.begin(), dst.point_ids.end());
      dst.pixels.insert(dst.pixels.end(), src.pixels.begin(), src.pixels.end());
      std::sort(dst.pixels.begin(), dst.pixels.end());
      dst.pixels.erase(std::unique(dst.pixels.begin(), dst.pixels.end()), dst.pixels.end());
      parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }
  }

  // Image-plane outline per part: convex hull of the part's pixel centers.
  // Attributes are image-plane quantities, so 3D parts are fitted through
  // their projection like 2D parts.
  const int w = grid.cloud->width;
  for (Part& p : parts) {
    std::vector<Vec2> px;
    px.reserve(p.pixels.size());
    for (int pix : p.pixels) px.push_back({pix % w + 0.5, pix / w + 0.5});
    try {
      p.outline = convex_hull(px);
    } catch (const DegenerateGeometry&) {
      // Nearly collinear projection: widen by half a pixel to keep a ring.
      Vec2 lo = px.front(), hi = px.front();
      for (Vec2 q : px) {
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
      }
      p.outline = {{lo.x - 0.5, lo.y - 0.5}, {hi.x + 0.5, lo.y - 0.5},
                   {hi.x + 0.5, hi.y + 0.5}, {lo.x - 0.5, hi.y + 0.5}};
    }
    p.centroid_px = ring_centroid(p.outline);
    p.area_px = static_cast<double>(p.pixels.size());
  }

  std::erase_if(parts, [](const Part& p) { return p.pixels.empty(); });
  return parts;
}

}  // namespace shapegrasp
