#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shapegrasp/bench.hpp"
#include "shapegrasp/grasp.hpp"

using namespace shapegrasp;

namespace {

// Scene with one rectangular part at a given angle on flat depth.
struct Fixture {
  SceneInput scene;
  std::vector<Part> parts;
};

Fixture rect_fixture(double angle_deg, double depth = 0.5, int img = 200) {
  Fixture f;
  f.scene.width = img;
  f.scene.height = img;
  f.scene.intrinsics = {300, 300, img / 2.0, img / 2.0};
  f.scene.mask = MaskImage(img, img, 0);
  f.scene.rgb = RgbImage(img, img, Rgb{0, 128, 0});
  f.scene.depth = FloatImage(img, img, 0.0f);
  f.scene.confidence = FloatImage(img, img, 1.0f);
  f.scene.has_depth = true;

  double a = angle_deg * M_PI / 180.0;
  double ca = std::cos(a), sa = std::sin(a);
  Part part;
  for (int y = 0; y < img; ++y)
    for (int x = 0; x < img; ++x) {
      double dx = x + 0.5 - img / 2.0, dy = y + 0.5 - img / 2.0;
      double u = ca * dx + sa * dy, v = -sa * dx + ca * dy;
      if (std::abs(u) <= 60 && std::abs(v) <= 12) {
        f.scene.mask.at(x, y) = 255;
        f.scene.depth.at(x, y) = static_cast<float>(depth);
        part.pixels.push_back(y * img + x);
      }
    }
  part.area_px = double(part.pixels.size());
  part.outline = {{-60, -12}, {60, -12}, {60, 12}, {-60, 12}};  // local, unused here
  part.centroid_px = {img / 2.0, img / 2.0};
  f.parts.push_back(std::move(part));
  return f;
}

}  // namespace

TEST_CASE("compute_grasp position and yaw") {
  SECTION("axis-aligned part at image center, flat depth 0.5") {
    Fixture f = rect_fixture(0.0);
    GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
    REQUIRE(pose.position_m.has_value());
    CHECK(pose.position_m->x == Catch::Approx(0.0).margin(0.002));
    CHECK(pose.position_m->y == Catch::Approx(0.0).margin(0.002));
    CHECK(pose.position_m->z == Catch::Approx(0.5));
    CHECK_FALSE(pose.ambiguous_yaw);
    CHECK(axis_angle_diff(pose.yaw_deg, 0.0) < 2.0);
  }

  SECTION("rotated parts recover the generator angle within 2 degrees") {
    for (double deg : {0.0, 30.0, 60.0, 120.0}) {
      Fixture f = rect_fixture(deg);
      GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
      CHECK(axis_angle_diff(pose.yaw_deg, deg) < 2.0);
    }
  }

  SECTION("circular part: ambiguous yaw, zero angle") {
    Fixture f = rect_fixture(0.0);
    // Replace the part with a disk.
    f.scene.mask = MaskImage(200, 200, 0);
    f.parts[0].pixels.clear();
    for (int y = 0; y < 200; ++y)
      for (int x = 0; x < 200; ++x) {
        double dx = x + 0.5 - 100, dy = y + 0.5 - 100;
        if (dx * dx + dy * dy <= 40 * 40) {
          f.scene.mask.at(x, y) = 255;
          f.scene.depth.at(x, y) = 0.5f;
          f.parts[0].pixels.push_back(y * 200 + x);
        }
      }
    GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
    CHECK(pose.ambiguous_yaw);
    CHECK(pose.yaw_deg == 0.0);
  }

  SECTION("position centroid lies inside the part's convex hull") {
    Fixture f = rect_fixture(35.0);
    GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
    std::vector<Vec2> px;
    for (int pix : f.parts[0].pixels)
      px.push_back({double(pix % f.scene.width), double(pix / f.scene.width)});
    Ring hull = convex_hull(px);
    CHECK(point_in_ring(pose.position_px, hull));
  }
}

TEST_CASE("median depth is robust to outliers") {
  Fixture f = rect_fixture(0.0, 0.5);
  GraspPose clean = compute_grasp(f.scene, f.parts, 0, 0);

  // Corrupt 20% of the part's depth pixels with large outliers.
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<float> out(2.0f, 5.0f);
  for (int pix : f.parts[0].pixels)
    if (u(rng) < 0.20) f.scene.depth.data[pix] = out(rng);

  GraspPose noisy = compute_grasp(f.scene, f.parts, 0, 0);
  REQUIRE(noisy.position_m.has_value());
  CHECK(std::abs(noisy.position_m->z - clean.position_m->z) < 0.005);  // < typical voxel size
}

TEST_CASE("depth fallbacks") {
  Fixture f = rect_fixture(0.0);

  SECTION("part without valid depth falls back to the mask median") {
    for (int pix : f.parts[0].pixels) f.scene.depth.data[pix] = 0.0f;
    // Give some other mask pixels valid depth.
    for (int x = 0; x < 50; ++x) {
      f.scene.mask.at(x, 0) = 255;
      f.scene.depth.at(x, 0) = 0.7f;
    }
    GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
    REQUIRE(pose.position_m.has_value());
    CHECK(pose.position_m->z == Catch::Approx(0.7));
  }

  SECTION("no depth at all: 2D-only pose") {
    f.scene.has_depth = false;
    f.scene.depth = FloatImage();
    GraspPose pose = compute_grasp(f.scene, f.parts, 0, 0);
    CHECK_FALSE(pose.position_m.has_value());
    CHECK(axis_angle_diff(pose.yaw_deg, 0.0) < 2.0);
  }

  SECTION("strict 3D raises without depth") {
    for (auto& d : f.scene.depth.data) d = 0.0f;
    CHECK_THROWS_AS(compute_grasp(f.scene, f.parts, 0, 0, true), NoValidDepth);
  }
}

TEST_CASE("yaw equivariance under raster rotation") {
  // Rotating the scene rasters by 90 degrees shifts yaw by 90 (mod 180).
  Fixture f = rect_fixture(25.0);
  GraspPose base = compute_grasp(f.scene, f.parts, 0, 0);

  SceneInput rot;
  rot.width = f.scene.height;
  rot.height = f.scene.width;
  rot.intrinsics = f.scene.intrinsics;
  rot.mask = MaskImage(rot.width, rot.height, 0);
  rot.rgb = RgbImage(rot.width, rot.height, Rgb{0, 128, 0});
  rot.depth = FloatImage(rot.width, rot.height, 0.0f);
  rot.confidence = FloatImage(rot.width, rot.height, 1.0f);
  rot.has_depth = true;
  Part rpart;
  for (int y = 0; y < f.scene.height; ++y)
    for (int x = 0; x < f.scene.width; ++x) {
      if (!f.scene.masked(x, y)) continue;
      int nx = f.scene.height - 1 - y, ny = x;  // 90-degree rotation
      rot.mask.at(nx, ny) = 255;
      rot.depth.at(nx, ny) = f.scene.depth.at(x, y);
      rpart.pixels.push_back(ny * rot.width + nx);
    }
  rpart.area_px = double(rpart.pixels.size());
  rpart.centroid_px = {rot.width / 2.0, rot.height / 2.0};
  std::vector<Part> parts{rpart};

  GraspPose rotated = compute_grasp(rot, parts, 0, 0);
  CHECK(axis_angle_diff(rotated.yaw_deg, base.yaw_deg + 90.0) < 2.0);
}

TEST_CASE("error paths") {
  Fixture f = rect_fixture(0.0);
  CHECK_THROWS_AS(compute_grasp(f.scene, f.parts, 2, 0), DegeneratePart);
  std::vector<Part> empty_part{Part{}};
  CHECK_THROWS_AS(compute_grasp(f.scene, empty_part, 0, 0), DegeneratePart);
}
