#include <catch2/catch_amalgamated.hpp>

#include "shapegrasp/contours.hpp"
#include "shapegrasp/shape_fit.hpp"

using namespace shapegrasp;

namespace {

// Rasterize an analytic shape and return the traced outline of its mask.
template <typename Inside>
Ring traced_outline(int w, int h, Inside inside) {
  MaskImage m(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (inside(x + 0.5, y + 0.5)) m.at(x, y) = 255;
  auto comps = extract_components(m);
  REQUIRE(!comps.empty());
  return comps[0].polygon.outer();
}

Ring rect_outline(double cx, double cy, double w, double h, double angle_deg, int img = 220) {
  double a = angle_deg * M_PI / 180.0;
  double ca = std::cos(a), sa = std::sin(a);
  return traced_outline(img, img, [&](double px, double py) {
    double dx = px - cx, dy = py - cy;
    double u = ca * dx + sa * dy, v = -sa * dx + ca * dy;
    return std::abs(u) <= w / 2 && std::abs(v) <= h / 2;
  });
}

}  // namespace

TEST_CASE("shape_factor") {
  SECTION("near-circular polygon approaches 1") {
    Ring gon;
    for (int i = 0; i < 360; ++i) {
      double a = 2 * M_PI * i / 360;
      gon.push_back({50 * std::cos(a), 50 * std::sin(a)});
    }
    CHECK(shape_factor(gon) >= 0.99);
  }

  SECTION("square is 2/pi") {
    Ring square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(shape_factor(square) == Catch::Approx(2.0 / M_PI).epsilon(1e-6));
  }

  SECTION("4:1 rectangle matches the analytic value") {
    Ring rect{{0, 0}, {4, 0}, {4, 1}, {0, 1}};
    double expected = 4.0 / (M_PI * 17.0 / 4.0);  // area / (pi * (diag/2)^2)
    CHECK(shape_factor(rect) == Catch::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("fit_primitive") {
  SECTION("rasterized disk of radius 40 comes back as a circle") {
    Ring outline = traced_outline(200, 200, [](double x, double y) {
      double dx = x - 100, dy = y - 100;
      return dx * dx + dy * dy <= 40.0 * 40.0;
    });
    CHECK(shape_factor(outline) >= 0.9);
    ShapePrimitive prim = fit_primitive(outline);
    REQUIRE(std::holds_alternative<CirclePrim>(prim));
    auto c = std::get<CirclePrim>(prim);
    CHECK(c.radius == Catch::Approx(40.0).margin(1.0));
    CHECK(c.center.x == Catch::Approx(100.0).margin(1.0));
  }

  SECTION("square never classifies as a circle") {
    Ring outline = rect_outline(100, 100, 80, 80, 0);
    CHECK(shape_factor(outline) == Catch::Approx(2.0 / M_PI).margin(0.02));
    ShapePrimitive prim = fit_primitive(outline);
    CHECK_FALSE(std::holds_alternative<CirclePrim>(prim));
  }

  SECTION("100x30 rectangle at 25 degrees") {
    Ring outline = rect_outline(110, 110, 100, 30, 25);
    ShapePrimitive prim = fit_primitive(outline);
    REQUIRE(std::holds_alternative<RectanglePrim>(prim));
    auto r = std::get<RectanglePrim>(prim);
    CHECK(r.long_side == Catch::Approx(100.0).margin(2.0));
    CHECK(r.short_side == Catch::Approx(30.0).margin(2.0));
    CHECK(axis_angle_diff(r.angle_deg, 25.0) < 1.0);
  }

  SECTION("isosceles triangle raster yields equal legs") {
    // Apex up, base horizontal.
    Ring outline = traced_outline(200, 200, [](double x, double y) {
      double base_y = 160, apex_y = 40, cx = 100, half_base = 60;
      if (y < apex_y || y > base_y) return false;
      double t = (y - apex_y) / (base_y - apex_y);
      return std::abs(x - cx) <= t * half_base;
    });
    ShapePrimitive prim = fit_primitive(outline);
    REQUIRE(std::holds_alternative<TrianglePrim>(prim));
    auto t = std::get<TrianglePrim>(prim);
    CHECK(t.base == Catch::Approx(120.0).margin(4.0));
    CHECK(distance(t.apex, t.base_mid) == Catch::Approx(120.0).margin(4.0));
    // Legs are equal by construction.
    Vec2 dir = normalized(perp(t.apex - t.base_mid));
    Vec2 b0 = t.base_mid + dir * (t.base / 2), b1 = t.base_mid - dir * (t.base / 2);
    CHECK(distance(t.apex, b0) == Catch::Approx(distance(t.apex, b1)).epsilon(1e-9));
    CHECK(t.leg == Catch::Approx(distance(t.apex, b0)).epsilon(1e-9));
  }

  SECTION("80x40 ellipse beats the rectangle on boundary error") {
    Ring outline = traced_outline(200, 200, [](double x, double y) {
      double dx = (x - 100) / 40.0, dy = (y - 100) / 20.0;
      return dx * dx + dy * dy <= 1.0;
    });
    ShapePrimitive prim = fit_primitive(outline);
    REQUIRE(std::holds_alternative<EllipsePrim>(prim));
    auto e = std::get<EllipsePrim>(prim);
    CHECK(e.major == Catch::Approx(80.0).margin(3.0));
    CHECK(e.minor == Catch::Approx(40.0).margin(3.0));

    // Numeric comparison of both candidates, as the dispatch does.
    RotatedRect rect = min_area_rect(outline);
    RectanglePrim rp{rect.center, rect.length, rect.width, rect.angle_deg};
    EllipsePrim ep{rect.center, rect.length, rect.width, rect.angle_deg};
    CHECK(mean_boundary_error(ShapePrimitive{ep}, outline) <
          mean_boundary_error(ShapePrimitive{rp}, outline));
  }

  SECTION("scale equivariance: kind preserved, parameters scale") {
    for (double scale : {1.0, 2.0, 4.0}) {
      int img = static_cast<int>(60 * scale) + 40;
      Ring outline = rect_outline(img / 2.0, img / 2.0, 50 * scale, 14 * scale, 0, img);
      ShapePrimitive prim = fit_primitive(outline);
      REQUIRE(std::holds_alternative<RectanglePrim>(prim));
      auto r = std::get<RectanglePrim>(prim);
      CHECK(r.long_side == Catch::Approx(50 * scale).margin(2.0 * scale));
      CHECK(r.short_side == Catch::Approx(14 * scale).margin(2.0 * scale));
    }
  }
}

TEST_CASE("dominant_color") {
  RgbImage img(10, 10);

  SECTION("every exact palette color maps to its own name") {
    for (const WebColor& w : web_palette()) {
      for (auto& px : img.data) px = {w.r, w.g, w.b};
      std::vector<int> pixels;
      for (int i = 0; i < 100; ++i) pixels.push_back(i);
      CHECK(dominant_color(pixels, img) == w.name);
    }
  }

  SECTION("mode over nearest-palette labels") {
    // 60% dark red, 40% near-white: red wins the mode.
    std::vector<int> pixels;
    for (int i = 0; i < 100; ++i) {
      img.data[i] = i < 60 ? Rgb{200, 20, 20} : Rgb{250, 250, 250};
      pixels.push_back(i);
    }
    CHECK(dominant_color(pixels, img) == "red");

    // Brute-force oracle: nearest palette entry per pixel, then the mode.
    std::map<std::string, int> counts;
    for (int i = 0; i < 100; ++i) {
      double best = 1e18;
      std::string name;
      for (const WebColor& w : web_palette()) {
        double d = (double(img.data[i].r) - w.r) * (double(img.data[i].r) - w.r) +
                   (double(img.data[i].g) - w.g) * (double(img.data[i].g) - w.g) +
                   (double(img.data[i].b) - w.b) * (double(img.data[i].b) - w.b);
        if (d < best) {
          best = d;
          name = w.name;
        }
      }
      counts[name]++;
    }
    std::string oracle = std::max_element(counts.begin(), counts.end(), [](auto& a, auto& b) {
                           return a.second < b.second;
                         })->first;
    CHECK(dominant_color(pixels, img) == oracle);
  }

  SECTION("always returns a palette member") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> u(0, 255);
    std::vector<int> pixels;
    for (int i = 0; i < 100; ++i) {
      img.data[i] = {std::uint8_t(u(rng)), std::uint8_t(u(rng)), std::uint8_t(u(rng))};
      pixels.push_back(i);
    }
    std::string name = dominant_color(pixels, img);
    bool found = false;
    for (const WebColor& w : web_palette())
      if (name == w.name) found = true;
    CHECK(found);
  }
}

TEST_CASE("node_attributes") {
  RgbImage rgb(50, 50, Rgb{128, 0, 0});

  SECTION("whole-object part: area 100, circle attributes") {
    Part part;
    part.outline = {{5, 5}, {45, 5}, {45, 45}, {5, 45}};
    for (int y = 5; y < 45; ++y)
      for (int x = 5; x < 45; ++x) part.pixels.push_back(y * 50 + x);
    part.area_px = double(part.pixels.size());
    part.centroid_px = {25, 25};

    CirclePrim circle{{25, 25}, 20};
    NodeAttributes a = node_attributes(part, ShapePrimitive{circle}, rgb, part.area_px);
    CHECK(a.area_pct == Catch::Approx(100.0));
    CHECK(a.aspect_ratio == 1.0);
    CHECK_FALSE(a.angle_deg.has_value());
    CHECK(a.width_px == Catch::Approx(40.0));
    CHECK(a.color == "maroon");
  }

  SECTION("rectangle attributes carry angle and aspect") {
    Part part;
    part.outline = {{0, 0}, {40, 0}, {40, 16}, {0, 16}};
    part.pixels = {0};
    part.area_px = 350;
    RectanglePrim rect{{20, 8}, 40, 16, 30};
    NodeAttributes a = node_attributes(part, ShapePrimitive{rect}, rgb, 1000);
    CHECK(a.area_pct == Catch::Approx(35.0));
    CHECK(a.aspect_ratio == Catch::Approx(2.5));
    REQUIRE(a.angle_deg.has_value());
    CHECK(*a.angle_deg == Catch::Approx(30.0));
    CHECK(a.width_px == Catch::Approx(16.0));
  }
}
