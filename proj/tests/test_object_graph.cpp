#include <catch2/catch_amalgamated.hpp>

#include "shapegrasp/object_graph.hpp"

using namespace shapegrasp;

namespace {

Part square_part(int x0, int y0, int side, int img_w) {
  Part p;
  p.outline = {{double(x0), double(y0)},
               {double(x0 + side), double(y0)},
               {double(x0 + side), double(y0 + side)},
               {double(x0), double(y0 + side)}};
  for (int y = y0; y < y0 + side; ++y)
    for (int x = x0; x < x0 + side; ++x) p.pixels.push_back(y * img_w + x);
  p.area_px = double(p.pixels.size());
  p.centroid_px = {x0 + side / 2.0, y0 + side / 2.0};
  return p;
}

NodeAttributes attrs_for(const Part& p, double total) {
  NodeAttributes a;
  a.shape = RectanglePrim{p.centroid_px, 10, 10, 0};
  a.centroid_px = p.centroid_px;
  a.area_pct = 100.0 * p.area_px / total;
  a.aspect_ratio = 1.0;
  a.angle_deg = 0.0;
  a.color = "gray";
  a.width_px = 10;
  return a;
}

}  // namespace

TEST_CASE("build_graph") {
  SECTION("one part: one node, no edges") {
    std::vector<Part> parts{square_part(0, 0, 10, 40)};
    std::vector<NodeAttributes> attrs{attrs_for(parts[0], parts[0].area_px)};
    ObjectGraph g = build_graph(parts, attrs, "thing", 40, 40);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.empty());
  }

  SECTION("two squares sharing a full side: one edge with contact ~10") {
    std::vector<Part> parts{square_part(0, 0, 10, 40), square_part(10, 0, 10, 40)};
    double total = parts[0].area_px + parts[1].area_px;
    std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};
    ObjectGraph g = build_graph(parts, attrs, "", 40, 40);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].contact_px == Catch::Approx(10.0).margin(1.0));
    CHECK(g.edges[0].a == 0);
    CHECK(g.edges[0].b == 1);
  }

  SECTION("nodes ordered by area descending; id 0 is the largest") {
    std::vector<Part> parts{square_part(0, 0, 6, 60), square_part(20, 0, 14, 60)};
    double total = parts[0].area_px + parts[1].area_px;
    std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};
    ObjectGraph g = build_graph(parts, attrs, "", 60, 60);
    CHECK(g.nodes[0].area_pct > g.nodes[1].area_pct);
    CHECK(g.part_of_node[0] == 1);
    CHECK(g.part_of_node[1] == 0);
  }

  SECTION("diagonal-only contact still forms an edge") {
    std::vector<Part> parts{square_part(0, 0, 5, 30), square_part(5, 5, 5, 30)};
    double total = parts[0].area_px + parts[1].area_px;
    std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};
    ObjectGraph g = build_graph(parts, attrs, "", 30, 30);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].contact_px >= 1.0);
  }

  SECTION("disjoint parts produce no edge") {
    std::vector<Part> parts{square_part(0, 0, 5, 40), square_part(20, 20, 5, 40)};
    double total = parts[0].area_px + parts[1].area_px;
    std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};
    ObjectGraph g = build_graph(parts, attrs, "", 40, 40);
    CHECK(g.edges.empty());
  }
}

TEST_CASE("serialize_graph") {
  std::vector<Part> parts{square_part(0, 0, 10, 40), square_part(10, 0, 8, 40)};
  double total = parts[0].area_px + parts[1].area_px;
  std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};

  SECTION("empty name serializes as null") {
    ObjectGraph g = build_graph(parts, attrs, "", 40, 40);
    auto j = nlohmann::json::parse(serialize_graph(g));
    CHECK(j.at("object").is_null());
  }

  SECTION("named object, fixed key order, rounded floats") {
    ObjectGraph g = build_graph(parts, attrs, "widget", 40, 40);
    std::string s = serialize_graph(g);
    auto j = nlohmann::json::parse(s);
    CHECK(j.at("object") == "widget");
    REQUIRE(j.at("nodes").size() == 2);
    CHECK(j.at("nodes")[0].at("id") == 0);
    // Key order is canonical.
    std::string expect_prefix = "{\"object\":\"widget\",\"nodes\":[{\"id\":0,\"shape\":";
    CHECK(s.substr(0, expect_prefix.size()) == expect_prefix);
    // One-decimal rounding.
    double pct = j.at("nodes")[0].at("area_pct").get<double>();
    CHECK(pct == Catch::Approx(std::round(pct * 10) / 10));
  }

  SECTION("byte-identical across repeated serialization") {
    ObjectGraph g = build_graph(parts, attrs, "widget", 40, 40);
    CHECK(serialize_graph(g) == serialize_graph(g));
    ObjectGraph g2 = build_graph(parts, attrs, "widget", 40, 40);
    CHECK(serialize_graph(g) == serialize_graph(g2));
  }

  SECTION("circle nodes serialize angle_deg as null") {
    std::vector<NodeAttributes> attrs2 = attrs;
    attrs2[0].shape = CirclePrim{{5, 5}, 5};
    attrs2[0].angle_deg.reset();
    ObjectGraph g = build_graph(parts, attrs2, "widget", 40, 40);
    auto j = nlohmann::json::parse(serialize_graph(g));
    CHECK(j.at("nodes")[0].at("angle_deg").is_null());
  }
}

TEST_CASE("render_overlay") {
  std::vector<Part> parts{square_part(0, 0, 10, 40), square_part(10, 0, 8, 40)};
  double total = parts[0].area_px + parts[1].area_px;
  std::vector<NodeAttributes> attrs{attrs_for(parts[0], total), attrs_for(parts[1], total)};
  ObjectGraph g = build_graph(parts, attrs, "widget", 40, 40);

  std::string svg = render_overlay(g, parts, 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 40 40\"") != std::string::npos);

  // 2 nodes -> 2 centroid markers; 1 edge -> 1 line.
  std::size_t circles = 0, lines = 0, pos = 0;
  while ((pos = svg.find("<circle", pos)) != std::string::npos) {
    ++circles;
    ++pos;
  }
  pos = 0;
  while ((pos = svg.find("<line", pos)) != std::string::npos) {
    ++lines;
    ++pos;
  }
  CHECK(circles == 2);
  CHECK(lines == 1);
  CHECK(svg.find("orange") != std::string::npos);  // selected node highlighted

  SECTION("single-node graph renders exactly one marker") {
    std::vector<Part> one{square_part(0, 0, 10, 40)};
    std::vector<NodeAttributes> a1{attrs_for(one[0], one[0].area_px)};
    ObjectGraph g1 = build_graph(one, a1, "", 40, 40);
    std::string svg1 = render_overlay(g1, one);
    std::size_t count = 0;
    for (pos = 0; (pos = svg1.find("<circle", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 1);
    CHECK(svg1.find("<line") == std::string::npos);
  }
}
