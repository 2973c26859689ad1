#pragma once

// Shared part/decomposition containers produced by the 2D and 3D routes and
// consumed by shape fitting, graph construction, and grasping.

#include <vector>

#include "shapegrasp/geometry.hpp"

namespace shapegrasp {

enum class DecompSource { TwoD, ThreeD };

inline const char* to_string(DecompSource s) {
  return s == DecompSource::TwoD ? "2d" : "3d";
}

struct Part {
  Ring outline;               // approximately convex outline, pixel coords
  std::vector<int> pixels;    // owned mask pixel indices (y * width + x)
  std::vector<int> point_ids; // 3D route only: indices into the point cloud
  Vec2 centroid_px;           // outline centroid
  double area_px = 0.0;       // pixel count
};

struct Decomposition {
  std::vector<Part> parts;
  DecompSource source = DecompSource::TwoD;
  double gamma_used = 0.0;
  int iterations = 0;   // threshold reductions performed by the search
  bool degenerate = false;  // still a single part at the gamma floor
  std::vector<double> gamma_sequence;  // thresholds tried, in order
  std::vector<int> part_counts;        // part count observed per threshold
};

}  // namespace shapegrasp
