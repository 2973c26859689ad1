#pragma once

// Grasp pose from the selected part: pixel centroid back-projected at the
// part's median depth, yaw along the part's largest principal component in
// the image plane. The consumer closes the gripper perpendicular to yaw.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"
#include "shapegrasp/scene.hpp"

namespace shapegrasp {

struct GraspPose {
  std::optional<Vec3> position_m;  // camera frame; absent without usable depth
  Vec2 position_px;                // pixel centroid of the part
  double yaw_deg = 0.0;            // [0,180), image-plane angle of the long axis
  bool ambiguous_yaw = false;      // near-isotropic part: yaw defaults to 0
  int source_node = -1;
};

// node_part maps the node id onto the decomposition's part index.
inline GraspPose compute_grasp(const SceneInput& scene, const std::vector<Part>& parts,
                               int part_index, int node_id, bool strict_3d = false) {
  if (part_index < 0 || part_index >= static_cast<int>(parts.size()))
    throw DegeneratePart("compute_grasp: part index out of range");
  const Part& part = parts[part_index];
  if (part.pixels.empty()) throw DegeneratePart("compute_grasp: part has no pixels");

  GraspPose pose;
  pose.source_node = node_id;

  // Pixel centroid of the part's pixel set.
  double sx = 0, sy = 0;
  for (int pix : part.pixels) {
    sx += pix % scene.width;
    sy += pix / scene.width;
  }
  double inv_n = 1.0 / static_cast<double>(part.pixels.size());
  pose.position_px = {sx * inv_n, sy * inv_n};

  // Median depth over the part; fall back to the whole mask.
  auto median_depth = [&](const std::vector<int>& pixels) -> std::optional<double> {
    std::vector<float> ds;
    for (int pix : pixels) {
      float d = scene.depth.data[pix];
      if (d > 0.0f) ds.push_back(d);
    }
    if (ds.empty()) return std::nullopt;
    std::size_t mid = ds.size() / 2;
    std::nth_element(ds.begin(), ds.begin() + mid, ds.end());
    double hi = ds[mid];
    if (ds.size() % 2 == 0) {
      double lo = *std::max_element(ds.begin(), ds.begin() + mid);
      return 0.5 * (lo + hi);
    }
    return hi;
  };

  std::optional<double> z;
  if (scene.has_depth) {
    z = median_depth(part.pixels);
    if (!z) {
      std::vector<int> mask_pixels;
      for (int y = 0; y < scene.height; ++y)
        for (int x = 0; x < scene.width; ++x)
          if (scene.masked(x, y)) mask_pixels.push_back(y * scene.width + x);
      z = median_depth(mask_pixels);
    }
  }
  if (!z && strict_3d) throw NoValidDepth("compute_grasp: no valid depth for the selected part");

  if (z) {
    pose.position_m = Vec3{(pose.position_px.x - scene.intrinsics.cx) * *z / scene.intrinsics.fx,
                           (pose.position_px.y - scene.intrinsics.cy) * *z / scene.intrinsics.fy,
                           *z};
  }

  // Yaw from the image-plane principal axes of the part. With depth, only
  // pixels that contributed 3D points count (the part's points projected back
  // to the image); without depth, all part pixels count.
  std::vector<Vec2> plane_pts;
  if (scene.has_depth) {
    for (int pix : part.pixels)
      if (scene.depth.data[pix] > 0.0f)
        plane_pts.push_back({double(pix % scene.width), double(pix / scene.width)});
  }
  if (plane_pts.size() < 2)
    for (int pix : part.pixels)
      plane_pts.push_back({double(pix % scene.width), double(pix / scene.width)});

  if (plane_pts.size() < 2) {
    pose.ambiguous_yaw = true;
    pose.yaw_deg = 0.0;
    return pose;
  }
  try {
    PrincipalAxes2 axes = principal_axes(plane_pts);
    if (axes.ambiguous) {
      pose.ambiguous_yaw = true;
      pose.yaw_deg = 0.0;
    } else {
      pose.yaw_deg = axes.angle_deg();
    }
  } catch (const DegenerateGeometry&) {
    pose.ambiguous_yaw = true;
    pose.yaw_deg = 0.0;
  }
  return pose;
}

}  // namespace shapegrasp
