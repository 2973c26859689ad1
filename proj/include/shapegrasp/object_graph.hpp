#pragma once

// The attributed part graph. Nodes are decomposed parts ordered by
// descending area (node 0 is the largest part); edges connect parts whose
// pixel sets share a boundary, attributed with the shared frontier length.
// Serialization is canonical: fixed key order, floats rounded to one decimal,
// byte-identical across runs for identical scenes.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/shape_fit.hpp"

namespace shapegrasp {

struct GraphEdge {
  int a = 0;  // a < b
  int b = 0;
  double contact_px = 0.0;
};

struct ObjectGraph {
  std::vector<NodeAttributes> nodes;  // index = node id
  std::vector<GraphEdge> edges;
  std::vector<int> part_of_node;  // node id -> index into the decomposition's parts
  std::string object_name;        // empty -> withheld
  int width = 0, height = 0;
};

// Nodes in descending area order (ties by centroid x, then y); an edge is
// added where one part's pixels touch another's (4-neighborhood, falling back
// to diagonal contact) with contact length = number of adjacent pixel pairs.
inline ObjectGraph build_graph(const std::vector<Part>& parts,
                               const std::vector<NodeAttributes>& attributes,
                               const std::string& object_name, int width, int height) {
  ObjectGraph g;
  g.object_name = object_name;
  g.width = width;
  g.height = height;

  std::vector<int> order(parts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (parts[a].area_px != parts[b].area_px) return parts[a].area_px > parts[b].area_px;
    if (parts[a].centroid_px.x != parts[b].centroid_px.x)
      return parts[a].centroid_px.x < parts[b].centroid_px.x;
    return parts[a].centroid_px.y < parts[b].centroid_px.y;
  });

  g.part_of_node = order;
  std::vector<int> node_of_part(parts.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    node_of_part[order[n]] = static_cast<int>(n);
    g.nodes.push_back(attributes[order[n]]);
  }

  // Pixel-ownership raster for adjacency counting.
  std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (int pix : parts[i].pixels) owner[pix] = node_of_part[i];

  std::size_t n_nodes = parts.size();
  std::vector<double> straight(n_nodes * n_nodes, 0.0), diagonal(n_nodes * n_nodes, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int a = owner[y * width + x];
      if (a < 0) continue;
      auto tally = [&](int nx, int ny, std::vector<double>& acc) {
        if (nx >= width || ny >= height || nx < 0) return;
        int b = owner[ny * width + nx];
        if (b < 0 || b == a) return;
        int lo = std::min(a, b), hi = std::max(a, b);
        acc[lo * n_nodes + hi] += 1.0;
      };
      tally(x + 1, y, straight);
      tally(x, y + 1, straight);
      tally(x + 1, y + 1, diagonal);
      tally(x - 1, y + 1, diagonal);
    }
  }
  for (std::size_t a = 0; a < n_nodes; ++a) {
    for (std::size_t b = a + 1; b < n_nodes; ++b) {
      double s = straight[a * n_nodes + b];
      double d = diagonal[a * n_nodes + b];
      if (s > 0)
        g.edges.push_back({static_cast<int>(a), static_cast<int>(b), s});
      else if (d > 0)
        g.edges.push_back({static_cast<int>(a), static_cast<int>(b), d});
    }
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return g;
}

namespace detail {
inline double round1(double v) { return std::round(v * 10.0) / 10.0; }
}  // namespace detail

inline nlohmann::ordered_json graph_to_json(const ObjectGraph& g) {
  nlohmann::ordered_json j;
  if (g.object_name.empty())
    j["object"] = nullptr;
  else
    j["object"] = g.object_name;

  j["nodes"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const NodeAttributes& n = g.nodes[i];
    nlohmann::ordered_json node;
    node["id"] = static_cast<int>(i);
    node["shape"] = shape_name(n.shape);
    node["area_pct"] = detail::round1(n.area_pct);
    node["aspect_ratio"] = detail::round1(n.aspect_ratio);
    if (n.angle_deg)
      node["angle_deg"] = detail::round1(*n.angle_deg);
    else
      node["angle_deg"] = nullptr;
    node["centroid"] = {detail::round1(n.centroid_px.x), detail::round1(n.centroid_px.y)};
    node["color"] = n.color;
    node["width_px"] = detail::round1(n.width_px);
    node["extra"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : n.extra) node["extra"][k] = v;
    j["nodes"].push_back(std::move(node));
  }

  j["edges"] = nlohmann::ordered_json::array();
  for (const GraphEdge& e : g.edges) {
    nlohmann::ordered_json edge;
    edge["a"] = e.a;
    edge["b"] = e.b;
    edge["contact_px"] = detail::round1(e.contact_px);
    j["edges"].push_back(std::move(edge));
  }
  return j;
}

inline std::string serialize_graph(const ObjectGraph& g) { return graph_to_json(g).dump(); }

// SVG 1.1 overlay: part outlines, centroid markers (green), edges (blue),
// node id labels; the selected node, when given, is highlighted in orange.
inline std::string render_overlay(const ObjectGraph& g, const std::vector<Part>& parts,
                                  int selected_node = -1) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << g.width
      << " " << g.height << "\">\n";

  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    const Part& part = parts[g.part_of_node[n]];
    bool sel = static_cast<int>(n) == selected_node;
    svg << "  <polygon points=\"";
    for (std::size_t i = 0; i < part.outline.size(); ++i) {
      if (i) svg << " ";
      svg << detail::round1(part.outline[i].x) << "," << detail::round1(part.outline[i].y);
    }
    svg << "\" fill=\"none\" stroke=\"" << (sel ? "orange" : "dimgray") << "\" stroke-width=\""
        << (sel ? 2.5 : 1) << "\"/>\n";
  }

  for (const GraphEdge& e : g.edges) {
    Vec2 pa = g.nodes[e.a].centroid_px;
    Vec2 pb = g.nodes[e.b].centroid_px;
    svg << "  <line x1=\"" << detail::round1(pa.x) << "\" y1=\"" << detail::round1(pa.y)
        << "\" x2=\"" << detail::round1(pb.x) << "\" y2=\"" << detail::round1(pb.y)
        << "\" stroke=\"blue\" stroke-width=\"1.5\"/>\n";
  }

  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    Vec2 c = g.nodes[n].centroid_px;
    bool sel = static_cast<int>(n) == selected_node;
    svg << "  <circle cx=\"" << detail::round1(c.x) << "\" cy=\"" << detail::round1(c.y)
        << "\" r=\"4\" fill=\"" << (sel ? "orange" : "green") << "\"/>\n";
    svg << "  <text x=\"" << detail::round1(c.x + 6) << "\" y=\"" << detail::round1(c.y - 6)
        << "\" font-size=\"12\" fill=\"black\">" << n << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace shapegrasp
