#pragma once

// Synthetic evaluation harness: parametric object analogues with per-part
// ground truth, a suite driver computing the part-identification /
// part-selection metrics plus a geometric grasp proxy, and the threshold
// sweep experiment.
//
// The grasp proxy substitutes for hardware lift success: a case passes when
// the selected part is a ground-truth part, the grasp point falls inside that
// part's mask, and the yaw is within 15 degrees of the part's long axis.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/decomp3d.hpp"
#include "shapegrasp/pipeline.hpp"

namespace shapegrasp {

// ---- synthetic object specs ----

struct ShapeSpec {
  enum class Kind { Rect, Circle, Ellipse, Triangle, Annulus } kind = Kind::Rect;
  double cx = 0, cy = 0;
  double w = 0, h = 0;           // rect
  double r = 0;                  // circle
  double a = 0, b = 0;           // ellipse full axes
  double base = 0, height = 0;   // triangle
  double r_outer = 0, r_inner = 0, arc_start_deg = 0, arc_end_deg = 360;  // annulus
  double angle_deg = 0;

  bool contains(double px, double py) const {
    double ang = angle_deg * M_PI / 180.0;
    double ca = std::cos(ang), sa = std::sin(ang);
    double dx = px - cx, dy = py - cy;
    double u = ca * dx + sa * dy;   // along angle
    double v = -sa * dx + ca * dy;  // across
    switch (kind) {
      case Kind::Rect:
        return std::abs(u) <= 0.5 * w && std::abs(v) <= 0.5 * h;
      case Kind::Circle:
        return dx * dx + dy * dy <= r * r;
      case Kind::Ellipse: {
        double fu = u / (0.5 * a), fv = v / (0.5 * b);
        return fu * fu + fv * fv <= 1.0;
      }
      case Kind::Triangle: {
        // Base midpoint at (cx,cy), base along the angle direction, apex at
        // height on the +v side.
        if (v < 0 || v > height) return false;
        double half_width = 0.5 * base * (1.0 - v / height);
        return std::abs(u) <= half_width;
      }
      case Kind::Annulus: {
        double rr = std::sqrt(dx * dx + dy * dy);
        if (rr < r_inner || rr > r_outer) return false;
        if (arc_end_deg - arc_start_deg >= 360.0) return true;
        double theta = std::atan2(dy, dx) * 180.0 / M_PI;
        if (theta < 0) theta += 360.0;
        double s = std::fmod(arc_start_deg + 360.0, 360.0);
        double e = std::fmod(arc_end_deg + 360.0, 360.0);
        if (s <= e) return theta >= s && theta <= e;
        return theta >= s || theta <= e;
      }
    }
    return false;
  }

  static ShapeSpec from_json(const nlohmann::json& j) {
    ShapeSpec s;
    std::string type = j.at("type").get<std::string>();
    s.cx = j.value("cx", 0.0);
    s.cy = j.value("cy", 0.0);
    s.angle_deg = j.value("angle_deg", 0.0);
    if (type == "rect") {
      s.kind = Kind::Rect;
      s.w = j.at("w").get<double>();
      s.h = j.at("h").get<double>();
    } else if (type == "circle") {
      s.kind = Kind::Circle;
      s.r = j.at("r").get<double>();
    } else if (type == "ellipse") {
      s.kind = Kind::Ellipse;
      s.a = j.at("a").get<double>();
      s.b = j.at("b").get<double>();
    } else if (type == "triangle") {
      s.kind = Kind::Triangle;
      s.base = j.at("base").get<double>();
      s.height = j.at("height").get<double>();
    } else if (type == "annulus") {
      s.kind = Kind::Annulus;
      s.r_outer = j.at("r_outer").get<double>();
      s.r_inner = j.at("r_inner").get<double>();
      s.arc_start_deg = j.value("arc_start_deg", 0.0);
      s.arc_end_deg = j.value("arc_end_deg", 360.0);
    } else {
      throw FileFormatError("unknown shape type: " + type);
    }
    return s;
  }
};

struct PartSpec {
  std::string label;
  ShapeSpec shape;
  Rgb color{128, 128, 128};
  double elevation_m = 0.0;
};

struct NoiseSpec {
  double conf_dropout = 0.0;     // fraction of masked pixels set to low confidence
  double conf_low_value = 0.2;
  double depth_jitter_sigma = 0.0;  // meters
  double depth_dropout = 0.0;    // fraction of masked pixels with depth zeroed
};

struct CaseSpec {
  std::string task;
  std::vector<std::string> expected;  // acceptable ground-truth part labels
  std::optional<double> max_gripper_width_px;
};

struct SyntheticObjectSpec {
  std::string name;
  int width = 320, height = 240;
  CameraIntrinsics camera{600, 600, 160, 120};
  double base_depth_m = 0.8;
  std::vector<PartSpec> parts;
  std::vector<CaseSpec> cases;
  std::map<std::string, std::vector<std::string>> synonyms;  // canonical -> alternates
  std::map<std::string, std::string> extra_object_attrs;
  NoiseSpec noise;

  static SyntheticObjectSpec from_json(const nlohmann::json& j) {
    SyntheticObjectSpec s;
    s.name = j.at("name").get<std::string>();
    if (j.contains("image")) {
      s.width = j.at("image").value("width", 320);
      s.height = j.at("image").value("height", 240);
    }
    s.camera.cx = s.width / 2.0;
    s.camera.cy = s.height / 2.0;
    if (j.contains("camera")) {
      const auto& c = j.at("camera");
      s.camera.fx = c.value("fx", 600.0);
      s.camera.fy = c.value("fy", 600.0);
      s.camera.cx = c.value("cx", s.camera.cx);
      s.camera.cy = c.value("cy", s.camera.cy);
      s.base_depth_m = c.value("base_depth_m", 0.8);
    }
    for (const auto& pj : j.at("parts")) {
      PartSpec p;
      p.label = pj.at("label").get<std::string>();
      p.shape = ShapeSpec::from_json(pj.at("shape"));
      if (pj.contains("color")) {
        const auto& c = pj.at("color");
        p.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(),
                   c.at(2).get<std::uint8_t>()};
      }
      p.elevation_m = pj.value("elevation_m", 0.0);
      s.parts.push_back(std::move(p));
    }
    for (const auto& cj : j.value("cases", nlohmann::json::array())) {
      CaseSpec c;
      c.task = cj.at("task").get<std::string>();
      for (const auto& e : cj.at("expected")) c.expected.push_back(e.get<std::string>());
      if (cj.contains("max_gripper_width_px"))
        c.max_gripper_width_px = cj.at("max_gripper_width_px").get<double>();
      s.cases.push_back(std::move(c));
    }
    if (j.contains("synonyms"))
      for (const auto& [canon, alts] : j.at("synonyms").items())
        for (const auto& a : alts) s.synonyms[canon].push_back(a.get<std::string>());
    if (j.contains("extra_object_attrs"))
      for (const auto& [k, v] : j.at("extra_object_attrs").items())
        s.extra_object_attrs[k] = v.get<std::string>();
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      s.noise.conf_dropout = n.value("conf_dropout", 0.0);
      s.noise.conf_low_value = n.value("conf_low_value", 0.2);
      s.noise.depth_jitter_sigma = n.value("depth_jitter_sigma", 0.0);
      s.noise.depth_dropout = n.value("depth_dropout", 0.0);
    }
    return s;
  }
};

struct GroundTruth {
  std::vector<int> part_of_pixel;            // -1 = background
  std::vector<std::vector<int>> part_pixels; // per spec part
  std::vector<std::string> labels;
};

struct GeneratedScene {
  SceneInput scene;
  GroundTruth gt;
};

// Deterministic rasterization: a pixel belongs to the first spec part whose
// shape contains the pixel center. Depth is base depth minus part elevation
// plus seeded jitter.
inline GeneratedScene generate(const SyntheticObjectSpec& spec, std::uint64_t seed = 7) {
  GeneratedScene out;
  SceneInput& s = out.scene;
  s.width = spec.width;
  s.height = spec.height;
  s.intrinsics = spec.camera;
  s.has_depth = true;
  s.mask = MaskImage(spec.width, spec.height, 0);
  s.rgb = RgbImage(spec.width, spec.height, Rgb{235, 235, 240});
  s.depth = FloatImage(spec.width, spec.height, 0.0f);
  s.confidence = FloatImage(spec.width, spec.height, 1.0f);

  out.gt.part_of_pixel.assign(static_cast<std::size_t>(spec.width) * spec.height, -1);
  out.gt.part_pixels.resize(spec.parts.size());
  for (const PartSpec& p : spec.parts) out.gt.labels.push_back(p.label);

  std::vector<std::size_t> contains_count(spec.parts.size(), 0);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      double px = x + 0.5, py = y + 0.5;
      int owner = -1;
      for (std::size_t i = 0; i < spec.parts.size(); ++i) {
        if (spec.parts[i].shape.contains(px, py)) {
          ++contains_count[i];
          if (owner < 0) owner = static_cast<int>(i);
        }
      }
      int pix = y * spec.width + x;
      s.depth.data[pix] = static_cast<float>(spec.base_depth_m);
      if (owner >= 0) {
        s.mask.data[pix] = 255;
        s.rgb.data[pix] = spec.parts[owner].color;
        s.depth.data[pix] =
            static_cast<float>(spec.base_depth_m - spec.parts[owner].elevation_m);
        out.gt.part_of_pixel[pix] = owner;
        out.gt.part_pixels[owner].push_back(pix);
      }
    }
  }

  for (std::size_t i = 0; i < spec.parts.size(); ++i) {
    if (out.gt.part_pixels[i].empty())
      throw SpecOverlapError("part fully occluded or empty: " + spec.parts[i].label);
    if (out.gt.part_pixels[i].size() * 2 < contains_count[i])
      throw SpecOverlapError("part mostly occluded by earlier parts: " + spec.parts[i].label);
  }

  std::mt19937_64 rng(seed ^ std::hash<std::string>{}(spec.name));
  if (spec.noise.depth_jitter_sigma > 0) {
    std::normal_distribution<double> jitter(0.0, spec.noise.depth_jitter_sigma);
    for (int pix = 0; pix < spec.width * spec.height; ++pix) {
      if (s.mask.data[pix] == 0) continue;
      double d = s.depth.data[pix] + jitter(rng);
      s.depth.data[pix] = static_cast<float>(std::max(0.01, d));
    }
  }
  if (spec.noise.conf_dropout > 0 || spec.noise.depth_dropout > 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int pix = 0; pix < spec.width * spec.height; ++pix) {
      if (s.mask.data[pix] == 0) continue;
      if (spec.noise.conf_dropout > 0 && u(rng) < spec.noise.conf_dropout)
        s.confidence.data[pix] = static_cast<float>(spec.noise.conf_low_value);
      if (spec.noise.depth_dropout > 0 && u(rng) < spec.noise.depth_dropout)
        s.depth.data[pix] = 0.0f;
    }
  }

  validate_scene(s);
  return out;
}

// Writes the scene in the CLI's input formats; returns the intrinsics path.
struct ScenePaths {
  std::string mask, rgb, depth, confidence, intrinsics;
};

inline ScenePaths write_scene(const SceneInput& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  ScenePaths p;
  p.mask = dir + "/mask.pgm";
  p.rgb = dir + "/rgb.ppm";
  p.depth = dir + "/depth.pfm";
  p.confidence = dir + "/confidence.pfm";
  p.intrinsics = dir + "/intrinsics.json";
  io::write_pgm(p.mask, s.mask);
  io::write_ppm(p.rgb, s.rgb);
  if (!s.depth.empty()) io::write_pfm(p.depth, s.depth);
  if (!s.confidence.empty()) io::write_pfm(p.confidence, s.confidence);
  nlohmann::ordered_json k;
  k["fx"] = s.intrinsics.fx;
  k["fy"] = s.intrinsics.fy;
  k["cx"] = s.intrinsics.cx;
  k["cy"] = s.intrinsics.cy;
  io::write_file_text(p.intrinsics, k.dump(2) + "\n");
  return p;
}

// ---- suite ----

struct Suite {
  std::uint64_t seed = 7;
  std::vector<SyntheticObjectSpec> objects;

  static Suite from_json(const nlohmann::json& j) {
    Suite s;
    s.seed = j.value("seed", 7);
    for (const auto& oj : j.at("objects")) s.objects.push_back(SyntheticObjectSpec::from_json(oj));
    return s;
  }

  static Suite load(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(io::read_file_text(path), nullptr, false);
    if (j.is_discarded()) throw FileFormatError("suite: invalid JSON: " + path);
    return from_json(j);
  }

  std::size_t case_count() const {
    std::size_t n = 0;
    for (const auto& o : objects) n += o.cases.size();
    return n;
  }
};

struct CaseRecord {
  std::string object;
  std::string task;
  int selected_node = -1;
  std::string selected_label;    // LLM label of the selected node ("" if none)
  std::string selected_gt_label; // ground-truth label of the selected node's part
  bool selection_correct = false;
  bool grasp_proxy_ok = false;
  bool degenerate = false;
  std::string source;            // 2d | 3d
  double gamma_used = 0.0;
  std::string error;             // non-empty when the case failed outright
};

struct EvalReport {
  std::vector<CaseRecord> records;
  double part_identification_global = 0.0;
  double part_identification_target = 0.0;
  bool has_identification = false;
  double part_selection = 0.0;
  double grasp_proxy = 0.0;
  std::size_t n_cases = 0;
  std::string stages;
  std::string backend;
};

namespace detail {

inline std::string normalize_label(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  auto issp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

// Canonicalize through the object's synonym lists.
inline std::string canonical_label(const std::string& raw, const SyntheticObjectSpec& spec) {
  std::string n = normalize_label(raw);
  for (const auto& [canon, alts] : spec.synonyms) {
    if (n == normalize_label(canon)) return normalize_label(canon);
    for (const auto& a : alts)
      if (n == normalize_label(a)) return normalize_label(canon);
  }
  return n;
}

// Majority-overlap ground-truth part for a computed part's pixel set.
inline int gt_part_for(const std::vector<int>& pixels, const GroundTruth& gt) {
  std::map<int, std::size_t> votes;
  for (int pix : pixels) {
    int p = gt.part_of_pixel[pix];
    if (p >= 0) ++votes[p];
  }
  int best = -1;
  std::size_t best_n = 0;
  for (const auto& [p, n] : votes) {
    if (n > best_n) {
      best_n = n;
      best = p;
    }
  }
  return best;
}

}  // namespace detail

// Runs the full pipeline for every object/task case. Decomposition and graph
// construction are computed once per object and shared across its cases.
inline EvalReport evaluate(const Suite& suite, const PipelineConfig& pipeline_config,
                           const ReasonerConfig& reasoner_base, ChatBackend& backend) {
  EvalReport report;
  report.stages = to_string(reasoner_base.stages);
  report.backend = backend.name();

  std::size_t id_total = 0, id_correct = 0;
  std::size_t idt_total = 0, idt_correct = 0;
  std::size_t sel_correct = 0, proxy_correct = 0;

  for (const SyntheticObjectSpec& spec : suite.objects) {
    GeneratedScene gen;
    AttributedGraph ag;
    DecompOutcome outcome;
    bool object_ok = true;
    std::string object_error;
    try {
      gen = generate(spec, suite.seed);
      outcome = run_decomposition(gen.scene, pipeline_config);
      ag = build_attributed_graph(gen.scene, outcome.selection.chosen.parts,
                                  reasoner_base.include_object_name ? spec.name : std::string{},
                                  pipeline_config.fit);
    } catch (const Error& e) {
      object_ok = false;
      object_error = std::string(e.kind()) + ": " + e.what();
    }

    for (const CaseSpec& cs : spec.cases) {
      CaseRecord rec;
      rec.object = spec.name;
      rec.task = cs.task;
      if (!object_ok) {
        rec.error = object_error;
        report.records.push_back(std::move(rec));
        continue;
      }
      rec.source = to_string(outcome.selection.chosen.source);
      rec.gamma_used = outcome.selection.chosen.gamma_used;
      rec.degenerate = outcome.selection.chosen.degenerate;

      try {
        ReasonerConfig rc = reasoner_base;
        rc.max_gripper_width_px = cs.max_gripper_width_px;
        rc.extra_object_attrs = spec.extra_object_attrs;

        ReasonerTranscript t =
            run_chain(ag.graph_json, spec.name, cs.task, rc, backend, ag.graph.nodes.size());
        int node = select_part(t.scores, ag.graph);
        rec.selected_node = node;
        auto lbl = t.semantics.labels.find(node);
        if (lbl != t.semantics.labels.end()) rec.selected_label = lbl->second;

        const Part& part = outcome.selection.chosen.parts[ag.graph.part_of_node[node]];
        int gt_part = detail::gt_part_for(part.pixels, gen.gt);
        rec.selected_gt_label = gt_part >= 0 ? gen.gt.labels[gt_part] : "";

        std::vector<std::string> expected_canon;
        for (const auto& e : cs.expected)
          expected_canon.push_back(detail::canonical_label(e, spec));
        std::string got = detail::canonical_label(rec.selected_gt_label, spec);
        rec.selection_correct =
            std::find(expected_canon.begin(), expected_canon.end(), got) != expected_canon.end();

        // Identification metrics over every node of this case's graph.
        if (!t.semantics.labels.empty()) {
          report.has_identification = true;
          for (std::size_t n = 0; n < ag.graph.nodes.size(); ++n) {
            const Part& np = outcome.selection.chosen.parts[ag.graph.part_of_node[n]];
            int gtp = detail::gt_part_for(np.pixels, gen.gt);
            if (gtp < 0) continue;
            std::string gt_label = detail::canonical_label(gen.gt.labels[gtp], spec);
            std::string assigned =
                detail::canonical_label(t.semantics.labels.at(static_cast<int>(n)), spec);
            ++id_total;
            if (assigned == gt_label) ++id_correct;
            if (std::find(expected_canon.begin(), expected_canon.end(), gt_label) !=
                expected_canon.end()) {
              ++idt_total;
              if (assigned == gt_label) ++idt_correct;
            }
          }
        }

        // Grasp proxy: pose inside the ground-truth part, yaw near its axis.
        GraspPose pose = compute_grasp(gen.scene, outcome.selection.chosen.parts,
                                       ag.graph.part_of_node[node], node);
        bool inside = false;
        if (gt_part >= 0) {
          int gx = static_cast<int>(std::lround(pose.position_px.x));
          int gy = static_cast<int>(std::lround(pose.position_px.y));
          if (gx >= 0 && gy >= 0 && gx < gen.scene.width && gy < gen.scene.height)
            inside = gen.gt.part_of_pixel[gy * gen.scene.width + gx] == gt_part;
        }
        bool yaw_ok = true;
        if (gt_part >= 0 && !pose.ambiguous_yaw) {
          std::vector<Vec2> gt_pts;
          for (int pix : gen.gt.part_pixels[gt_part])
            gt_pts.push_back({double(pix % gen.scene.width), double(pix / gen.scene.width)});
          PrincipalAxes2 axes = principal_axes(gt_pts);
          if (!axes.ambiguous) yaw_ok = axis_angle_diff(pose.yaw_deg, axes.angle_deg()) <= 15.0;
        }
        rec.grasp_proxy_ok = rec.selection_correct && inside && yaw_ok;
      } catch (const Error& e) {
        rec.error = std::string(e.kind()) + ": " + e.what();
      }

      if (rec.selection_correct) ++sel_correct;
      if (rec.grasp_proxy_ok) ++proxy_correct;
      report.records.push_back(std::move(rec));
    }
  }

  report.n_cases = report.records.size();
  if (report.n_cases > 0) {
    report.part_selection = double(sel_correct) / double(report.n_cases);
    report.grasp_proxy = double(proxy_correct) / double(report.n_cases);
  }
  if (id_total > 0) report.part_identification_global = double(id_correct) / double(id_total);
  if (idt_total > 0) report.part_identification_target = double(idt_correct) / double(idt_total);
  return report;
}

// ---- threshold sweep (parts vs gamma, both routes) ----

struct SweepRow {
  double gamma = 0.0;
  int parts_2d = 0;
  int parts_3d = 0;
};

inline std::vector<SweepRow> sweep_thresholds(const SyntheticObjectSpec& spec,
                                              const std::vector<double>& gammas,
                                              const PipelineConfig& config, std::uint64_t seed = 7) {
  GeneratedScene gen = generate(spec, seed);
  std::vector<MaskComponent> comps = extract_components(gen.scene.mask);
  if (comps.empty()) throw EmptyMask("sweep: no components");
  const MaskComponent& comp = comps.front();

  PointCloud cloud = back_project(gen.scene, config.valid_conf_cutoff);
  VoxelGrid grid = voxelize(cloud, config.voxelize);

  std::vector<SweepRow> rows;
  for (double g : gammas) {
    SweepRow row;
    row.gamma = g;
    row.parts_2d = static_cast<int>(
        decompose_mask_2d(comp, gen.scene.width, gen.scene.height, g, config.decomp2d).size());
    row.parts_3d = static_cast<int>(decompose_3d(grid, g, config.decomp3d).size());
    rows.push_back(row);
  }
  return rows;
}

// ---- report rendering ----

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["backend"] = r.backend;
  j["stages"] = r.stages;
  j["n_cases"] = r.n_cases;
  nlohmann::ordered_json agg;
  if (r.has_identification) {
    agg["part_identification_global"] = r.part_identification_global;
    agg["part_identification_target"] = r.part_identification_target;
  } else {
    agg["part_identification_global"] = nullptr;
    agg["part_identification_target"] = nullptr;
  }
  agg["part_selection"] = r.part_selection;
  agg["grasp_proxy"] = r.grasp_proxy;
  j["aggregates"] = std::move(agg);
  j["cases"] = nlohmann::ordered_json::array();
  for (const CaseRecord& c : r.records) {
    nlohmann::ordered_json cj;
    cj["object"] = c.object;
    cj["task"] = c.task;
    cj["selected_node"] = c.selected_node;
    cj["selected_label"] = c.selected_label;
    cj["selected_gt_label"] = c.selected_gt_label;
    cj["selection_correct"] = c.selection_correct;
    cj["grasp_proxy_ok"] = c.grasp_proxy_ok;
    cj["degenerate"] = c.degenerate;
    cj["source"] = c.source;
    cj["gamma_used"] = c.gamma_used;
    if (!c.error.empty()) cj["error"] = c.error;
    j["cases"].push_back(std::move(cj));
  }
  return j;
}

inline std::string render_eval_table(const EvalReport& r) {
  std::ostringstream ss;
  ss << "case results\n";
  ss << "  object            task                        sel  expected-part        ok  proxy\n";
  for (const CaseRecord& c : r.records) {
    char line[256];
    std::snprintf(line, sizeof(line), "  %-17s %-27s %3d  %-19s %3s  %5s\n", c.object.c_str(),
                  c.task.c_str(), c.selected_node, c.selected_gt_label.c_str(),
                  c.selection_correct ? "yes" : "NO", c.grasp_proxy_ok ? "yes" : "NO");
    ss << line;
  }
  ss << "\naggregates (backend=" << r.backend << ", stages=" << r.stages << ")\n";
  char line[256];
  if (r.has_identification) {
    std::snprintf(line, sizeof(line),
                  "  Part ID %.2f (%.2f)   Part Sel. %.2f   Grasp proxy %.2f   Cases %zu\n",
                  r.part_identification_global, r.part_identification_target, r.part_selection,
                  r.grasp_proxy, r.n_cases);
  } else {
    std::snprintf(line, sizeof(line),
                  "  Part ID n/a           Part Sel. %.2f   Grasp proxy %.2f   Cases %zu\n",
                  r.part_selection, r.grasp_proxy, r.n_cases);
  }
  ss << line;
  return ss.str();
}

inline std::string render_sweep_table(const std::string& object_name,
                                      const std::vector<SweepRow>& rows) {
  std::ostringstream ss;
  ss << "threshold sweep: " << object_name << "\n  gamma   parts_2d  parts_3d\n";
  for (const SweepRow& r : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "  %.3f   %8d  %8d\n", r.gamma, r.parts_2d, r.parts_3d);
    ss << line;
  }
  return ss.str();
}

}  // namespace shapegrasp
