#pragma once

// Scene loading and the mask -> metric point cloud step. A scene is the
// segmented object's rasters (mask, rgb, optional depth + confidence) plus
// camera intrinsics for back-projection.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/errors.hpp"
#include "shapegrasp/geometry.hpp"
#include "shapegrasp/image.hpp"

namespace shapegrasp {

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw FileFormatError("intrinsics: fx and fy must be > 0");
  }
};

inline CameraIntrinsics load_intrinsics(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw FileFormatError("intrinsics JSON parse error: " + std::string(e.what()));
  }
  CameraIntrinsics k;
  try {
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
  } catch (const nlohmann::json::exception&) {
    throw FileFormatError("intrinsics JSON must contain fx, fy, cx, cy: " + path);
  }
  k.validate();
  return k;
}

struct SceneInput {
  int width = 0;
  int height = 0;
  RgbImage rgb;
  MaskImage mask;       // nonzero = object
  FloatImage depth;     // meters; 0 = invalid; empty when no depth provided
  FloatImage confidence;  // [0,1]; empty -> treated as all fully confident
  CameraIntrinsics intrinsics;
  bool has_depth = false;

  bool masked(int x, int y) const { return mask.at(x, y) != 0; }

  double confidence_at(int x, int y) const {
    return confidence.empty() ? 1.0 : static_cast<double>(confidence.at(x, y));
  }

  std::size_t mask_count() const {
    std::size_t n = 0;
    for (auto v : mask.data) n += v != 0;
    return n;
  }
};

// One point per masked pixel with valid depth (and confidence at or above the
// valid-pixel cutoff, 0 by default so depth validity alone decides).
struct PointCloud {
  std::vector<Vec3> points;     // meters, camera frame
  std::vector<int> pixel_of;    // parallel: source pixel index (y * width + x)
  int width = 0;                // source image dims, for pixel decoding
  int height = 0;
};

inline void validate_scene(const SceneInput& s) {
  auto check_dims = [&](int w, int h, const char* what) {
    if (w != s.width || h != s.height)
      throw DimensionMismatch(std::string(what) + " raster size differs from mask");
  };
  if (s.width <= 0 || s.height <= 0) throw FileFormatError("scene has empty dimensions");
  check_dims(s.mask.width, s.mask.height, "mask");
  check_dims(s.rgb.width, s.rgb.height, "rgb");
  if (!s.depth.empty()) check_dims(s.depth.width, s.depth.height, "depth");
  if (!s.confidence.empty()) check_dims(s.confidence.width, s.confidence.height, "confidence");

  if (s.mask_count() == 0) throw EmptyMask("mask has no set pixels");

  for (float d : s.depth.data) {
    if (!(d >= 0.0f) || !std::isfinite(d)) throw FileFormatError("depth values must be finite and >= 0");
  }
  for (float c : s.confidence.data) {
    if (!(c >= 0.0f && c <= 1.0f)) throw FileFormatError("confidence values must lie in [0,1]");
  }
  if (s.has_depth) s.intrinsics.validate();
}

// Load and validate a scene from files. depth/confidence/intrinsics paths may
// be empty for RGB-only operation.
inline SceneInput load_scene(const std::string& mask_path, const std::string& depth_path,
                             const std::string& confidence_path, const std::string& rgb_path,
                             const std::string& intrinsics_path) {
  SceneInput s;
  s.mask = io::read_gray(mask_path);
  s.rgb = io::read_rgb(rgb_path);
  s.width = s.mask.width;
  s.height = s.mask.height;
  if (!depth_path.empty()) {
    s.depth = io::read_float_raster(depth_path);
    s.has_depth = true;
  }
  if (!confidence_path.empty()) s.confidence = io::read_float_raster(confidence_path);
  if (!intrinsics_path.empty()) {
    s.intrinsics = load_intrinsics(intrinsics_path);
  } else if (s.has_depth) {
    throw FileFormatError("depth input requires camera intrinsics");
  }
  for (auto& v : s.mask.data) v = v ? 255 : 0;
  validate_scene(s);
  return s;
}

// Pinhole back-projection of masked pixels with valid depth:
//   x = (u - cx) * d / fx,  y = (v - cy) * d / fy,  z = d
// Pixels with d = 0 are skipped but still belong to the 2D mask.
inline PointCloud back_project(const SceneInput& s, double valid_conf_cutoff = 0.0) {
  if (!s.has_depth) throw NoValidDepth("back_project: scene has no depth raster");
  s.intrinsics.validate();
  PointCloud cloud;
  cloud.width = s.width;
  cloud.height = s.height;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (!s.masked(x, y)) continue;
      double d = s.depth.at(x, y);
      if (!(d > 0.0)) continue;
      if (s.confidence_at(x, y) < valid_conf_cutoff) continue;
      cloud.points.push_back({(x - s.intrinsics.cx) * d / s.intrinsics.fx,
                              (y - s.intrinsics.cy) * d / s.intrinsics.fy, d});
      cloud.pixel_of.push_back(y * s.width + x);
    }
  }
  if (cloud.points.size() < 3)
    throw DegeneratePointCloud("back_project: fewer than 3 valid depth points");
  return cloud;
}

// Fraction of masked pixels whose confidence reaches the high-confidence
// cutoff. Pixels outside the mask never contribute.
inline double depth_confidence_fraction(const SceneInput& s, double high_conf_cutoff = 0.5) {
  std::size_t masked = 0, confident = 0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (!s.masked(x, y)) continue;
      ++masked;
      if (s.confidence_at(x, y) >= high_conf_cutoff) ++confident;
    }
  }
  if (masked == 0) throw EmptyMask("depth_confidence_fraction: empty mask");
  return static_cast<double>(confident) / static_cast<double>(masked);
}

}  // namespace shapegrasp
