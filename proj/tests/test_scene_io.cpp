#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "shapegrasp/bench.hpp"
#include "shapegrasp/scene.hpp"

using namespace shapegrasp;

namespace {

std::string temp_dir() {
  static std::string dir = [] {
    auto d = std::filesystem::temp_directory_path() / "sg_scene_io_tests";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir;
}

SceneInput tiny_scene(int w, int h) {
  SceneInput s;
  s.width = w;
  s.height = h;
  s.mask = MaskImage(w, h, 0);
  s.rgb = RgbImage(w, h, Rgb{200, 10, 10});
  s.depth = FloatImage(w, h, 0.0f);
  s.confidence = FloatImage(w, h, 1.0f);
  s.intrinsics = {100, 100, w / 2.0, h / 2.0};
  s.has_depth = true;
  return s;
}

}  // namespace

TEST_CASE("image round trips: PGM, PPM, PFM") {
  std::string dir = temp_dir();
  MaskImage m(13, 7, 0);
  for (std::size_t i = 0; i < m.size(); ++i) m.data[i] = static_cast<std::uint8_t>(i * 3);
  io::write_pgm(dir + "/a.pgm", m);
  MaskImage m2 = io::read_pgm(dir + "/a.pgm");
  REQUIRE(m2.width == 13);
  REQUIRE(m2.height == 7);
  CHECK(m2.data == m.data);

  RgbImage c(5, 4);
  for (std::size_t i = 0; i < c.size(); ++i)
    c.data[i] = {std::uint8_t(i), std::uint8_t(i * 2), std::uint8_t(255 - i)};
  io::write_ppm(dir + "/c.ppm", c);
  RgbImage c2 = io::read_ppm(dir + "/c.ppm");
  CHECK(c2.data == c.data);

  FloatImage f(6, 9);
  std::mt19937 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 2.0f);
  for (auto& v : f.data) v = u(rng);
  io::write_pfm(dir + "/f.pfm", f);
  FloatImage f2 = io::read_pfm(dir + "/f.pfm");
  REQUIRE(f2.width == 6);
  CHECK(f2.data == f.data);
}

TEST_CASE("raw float raster with sidecar JSON") {
  std::string dir = temp_dir();
  FloatImage f(4, 3);
  for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = float(i) * 0.25f;
  io::write_file_bytes(dir + "/d.f32", f.data.data(), f.data.size() * 4);
  io::write_file_text(dir + "/d.f32.json", "{\"width\":4,\"height\":3}");
  FloatImage g = io::read_float_raster(dir + "/d.f32");
  CHECK(g.data == f.data);

  SECTION("missing sidecar") {
    io::write_file_bytes(dir + "/nosidecar.f32", f.data.data(), f.data.size() * 4);
    CHECK_THROWS_AS(io::read_float_raster(dir + "/nosidecar.f32"), FileFormatError);
  }
}

TEST_CASE("load_scene validation") {
  std::string dir = temp_dir();

  SECTION("all-background mask -> EmptyMask") {
    SceneInput s = tiny_scene(64, 64);
    io::write_pgm(dir + "/empty_mask.pgm", s.mask);
    io::write_ppm(dir + "/empty_rgb.ppm", s.rgb);
    CHECK_THROWS_AS(load_scene(dir + "/empty_mask.pgm", "", "", dir + "/empty_rgb.ppm", ""),
                    EmptyMask);
  }

  SECTION("dimension mismatch") {
    SceneInput s = tiny_scene(64, 64);
    s.mask.at(10, 10) = 255;
    io::write_pgm(dir + "/m64.pgm", s.mask);
    io::write_ppm(dir + "/rgb64.ppm", s.rgb);
    FloatImage depth32(32, 32, 0.5f);
    io::write_pfm(dir + "/d32.pfm", depth32);
    io::write_file_text(dir + "/k.json", R"({"fx":100,"fy":100,"cx":32,"cy":32})");
    CHECK_THROWS_AS(
        load_scene(dir + "/m64.pgm", dir + "/d32.pfm", "", dir + "/rgb64.ppm", dir + "/k.json"),
        DimensionMismatch);
  }

  SECTION("depth without intrinsics is rejected") {
    SceneInput s = tiny_scene(16, 16);
    s.mask.at(5, 5) = 255;
    io::write_pgm(dir + "/m16.pgm", s.mask);
    io::write_ppm(dir + "/rgb16.ppm", s.rgb);
    io::write_pfm(dir + "/d16.pfm", s.depth);
    CHECK_THROWS_AS(load_scene(dir + "/m16.pgm", dir + "/d16.pfm", "", dir + "/rgb16.ppm", ""),
                    FileFormatError);
  }

  SECTION("bench fixture loads with expected dimensions") {
    SyntheticObjectSpec spec;
    spec.name = "fixture";
    spec.width = 640;
    spec.height = 480;
    spec.camera = {600, 600, 320, 240};
    PartSpec part;
    part.label = "slab";
    part.shape.kind = ShapeSpec::Kind::Rect;
    part.shape.cx = 320;
    part.shape.cy = 240;
    part.shape.w = 200;
    part.shape.h = 120;
    part.elevation_m = 0.05;
    spec.parts.push_back(part);
    GeneratedScene gen = generate(spec, 3);
    ScenePaths paths = write_scene(gen.scene, dir + "/fixture");
    SceneInput loaded =
        load_scene(paths.mask, paths.depth, paths.confidence, paths.rgb, paths.intrinsics);
    CHECK(loaded.width == 640);
    CHECK(loaded.height == 480);
    CHECK(loaded.has_depth);
    CHECK(loaded.mask_count() == gen.scene.mask_count());
  }
}

TEST_CASE("back_project geometry") {
  SceneInput s = tiny_scene(41, 41);  // cx=20.5 -> use explicit intrinsics below
  s.intrinsics = {100, 100, 20, 20};
  s.mask.at(20, 20) = 255;
  s.depth.at(20, 20) = 1.0f;

  SECTION("principal point maps to the optical axis") {
    s.mask.at(21, 20) = 255;
    s.depth.at(21, 20) = 1.0f;
    s.mask.at(20, 21) = 255;
    s.depth.at(20, 21) = 1.0f;
    PointCloud cloud = back_project(s);
    REQUIRE(cloud.points.size() == 3);
    CHECK(cloud.points[0].x == Catch::Approx(0.0).margin(1e-12));
    CHECK(cloud.points[0].y == Catch::Approx(0.0).margin(1e-12));
    CHECK(cloud.points[0].z == Catch::Approx(1.0));
  }

  SECTION("unit offset at fx pixels gives x = z") {
    SceneInput t = tiny_scene(241, 41);
    t.intrinsics = {100, 100, 20, 20};
    t.mask.at(20, 20) = 255;
    t.depth.at(20, 20) = 2.0f;
    t.mask.at(120, 20) = 255;  // cx + fx
    t.depth.at(120, 20) = 2.0f;
    t.mask.at(21, 20) = 255;
    t.depth.at(21, 20) = 2.0f;
    PointCloud cloud = back_project(t);
    REQUIRE(cloud.points.size() == 3);
    CHECK(cloud.points[2].x == Catch::Approx(2.0));
    CHECK(cloud.points[2].z == Catch::Approx(2.0));
  }

  SECTION("synthetic plane: every masked pixel with depth becomes one point") {
    SceneInput t = tiny_scene(30, 30);
    int masked = 0;
    for (int y = 10; y < 20; ++y)
      for (int x = 10; x < 20; ++x) {
        t.mask.at(x, y) = 255;
        t.depth.at(x, y) = 0.5f;
        ++masked;
      }
    t.depth.at(12, 12) = 0.0f;  // invalid depth pixel is skipped
    PointCloud cloud = back_project(t);
    CHECK(cloud.points.size() == std::size_t(masked - 1));
    for (const Vec3& p : cloud.points) CHECK(p.z == Catch::Approx(0.5));
    // Oracle: re-project through the intrinsics and recover the source pixel.
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      const Vec3& p = cloud.points[i];
      double u = p.x * t.intrinsics.fx / p.z + t.intrinsics.cx;
      double v = p.y * t.intrinsics.fy / p.z + t.intrinsics.cy;
      int px = cloud.pixel_of[i] % t.width, py = cloud.pixel_of[i] / t.width;
      CHECK(std::abs(u - px) < 0.5);
      CHECK(std::abs(v - py) < 0.5);
    }
  }

  SECTION("fewer than 3 valid points -> DegeneratePointCloud") {
    CHECK_THROWS_AS(back_project(s), DegeneratePointCloud);
  }
}

TEST_CASE("depth_confidence_fraction") {
  SceneInput s = tiny_scene(10, 10);
  for (int x = 0; x < 10; ++x) s.mask.at(x, 0) = 255;

  SECTION("all confident") { CHECK(depth_confidence_fraction(s) == Catch::Approx(1.0)); }

  SECTION("half at 0.9, half at 0.1, cutoff 0.5") {
    for (int x = 0; x < 10; ++x) s.confidence.at(x, 0) = x < 5 ? 0.9f : 0.1f;
    CHECK(depth_confidence_fraction(s, 0.5) == Catch::Approx(0.5));
  }

  SECTION("pixels outside the mask are ignored") {
    for (int y = 1; y < 10; ++y)
      for (int x = 0; x < 10; ++x) s.confidence.at(x, y) = 0.0f;
    CHECK(depth_confidence_fraction(s) == Catch::Approx(1.0));
  }

  SECTION("noisy bench fixture matches a direct count") {
    SyntheticObjectSpec spec;
    spec.name = "reflective bottle";
    spec.width = 200;
    spec.height = 160;
    PartSpec part;
    part.label = "body";
    part.shape.kind = ShapeSpec::Kind::Rect;
    part.shape.cx = 100;
    part.shape.cy = 80;
    part.shape.w = 70;
    part.shape.h = 120;
    spec.parts.push_back(part);
    spec.noise.conf_dropout = 0.38;
    GeneratedScene gen = generate(spec, 7);

    std::size_t masked = 0, confident = 0;
    for (int y = 0; y < gen.scene.height; ++y)
      for (int x = 0; x < gen.scene.width; ++x) {
        if (!gen.scene.masked(x, y)) continue;
        ++masked;
        if (gen.scene.confidence.at(x, y) >= 0.5f) ++confident;
      }
    double oracle = double(confident) / double(masked);
    CHECK(depth_confidence_fraction(gen.scene, 0.5) == Catch::Approx(oracle));
    CHECK(oracle == Catch::Approx(0.62).margin(0.03));
  }
}
