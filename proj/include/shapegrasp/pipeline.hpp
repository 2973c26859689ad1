#pragma once

// End-to-end orchestration: scene -> contours -> 2D/3D threshold searches ->
// heuristic selection -> primitive fitting -> graph -> reasoning chain ->
// grasp pose, with per-stage timings and a canonical run report.

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/contours.hpp"
#include "shapegrasp/decomp2d.hpp"
#include "shapegrasp/decomp3d.hpp"
#include "shapegrasp/grasp.hpp"
#include "shapegrasp/object_graph.hpp"
#include "shapegrasp/reasoner.hpp"
#include "shapegrasp/scene.hpp"
#include "shapegrasp/selector.hpp"
#include "shapegrasp/shape_fit.hpp"

namespace shapegrasp {

inline constexpr const char* kPipelineVersion = "1.0.0";

enum class PipelineMode { Auto, TwoD, ThreeD };

inline const char* to_string(PipelineMode m) {
  switch (m) {
    case PipelineMode::Auto: return "auto";
    case PipelineMode::TwoD: return "2d";
    default: return "3d";
  }
}

inline PipelineMode mode_from_string(const std::string& s) {
  if (s == "auto") return PipelineMode::Auto;
  if (s == "2d") return PipelineMode::TwoD;
  if (s == "3d") return PipelineMode::ThreeD;
  throw ConfigError("unknown mode: " + s);
}

struct PipelineConfig {
  PipelineMode mode = PipelineMode::Auto;
  SelectorConfig selector;
  FitParams fit;
  Decomp2DParams decomp2d;
  Decomp3DParams decomp3d;
  VoxelizeParams voxelize;
  double high_conf_cutoff = 0.5;   // per-pixel cutoff behind the alpha fraction
  double valid_conf_cutoff = 0.0;  // cloud-inclusion cutoff
};

struct StageTimings {
  double decompose_ms = 0.0;
  double fit_ms = 0.0;
  double reason_ms = 0.0;
  double grasp_ms = 0.0;
  double total_ms = 0.0;
};

struct DecompOutcome {
  SelectionResult selection;
  MaskComponent component;   // the object component the pipeline ran on
  double conf_fraction = 1.0;
  bool three_d_ran = false;
  std::optional<PointCloud> cloud;
};

namespace detail {

class StageClock {
public:
  StageClock() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Runs the threshold searches and the 2D/3D selection for a scene.
inline DecompOutcome run_decomposition(const SceneInput& scene, const PipelineConfig& config) {
  config.selector.validate();
  DecompOutcome out;

  std::vector<MaskComponent> comps = extract_components(scene.mask);
  if (comps.empty()) throw EmptyMask("run_decomposition: no mask components");
  out.component = std::move(comps.front());  // largest component is the object

  auto decompose2 = [&](double gamma) {
    return decompose_mask_2d(out.component, scene.width, scene.height, gamma, config.decomp2d);
  };

  Decomposition c2d;
  if (config.mode != PipelineMode::ThreeD)
    c2d = threshold_search(decompose2, config.selector.gamma_init_2d, config.selector,
                           DecompSource::TwoD);

  bool want_3d = config.mode != PipelineMode::TwoD && scene.has_depth;
  Decomposition c3d;
  if (want_3d) {
    out.conf_fraction = depth_confidence_fraction(scene, config.high_conf_cutoff);
    out.cloud = back_project(scene, config.valid_conf_cutoff);
    VoxelGrid grid = voxelize(*out.cloud, config.voxelize);
    auto decompose3 = [&](double gamma) { return decompose_3d(grid, gamma, config.decomp3d); };
    c3d = threshold_search(decompose3, config.selector.gamma_init_3d, config.selector,
                           DecompSource::ThreeD);
    out.three_d_ran = true;
  }

  switch (config.mode) {
    case PipelineMode::TwoD:
      out.selection.chosen = std::move(c2d);
      out.selection.reason = SelectReason::Forced2D;
      out.selection.conf_fraction = 1.0;
      break;
    case PipelineMode::ThreeD: {
      if (!want_3d) throw NoValidDepth("mode 3d requires a depth raster");
      out.selection.chosen = std::move(c3d);
      out.selection.rejected = std::move(c2d);
      out.selection.reason = SelectReason::Preferred3D;
      out.selection.conf_fraction = out.conf_fraction;
      break;
    }
    case PipelineMode::Auto:
      if (!want_3d) {
        out.selection.chosen = std::move(c2d);
        out.selection.reason = SelectReason::Forced2D;
        out.selection.conf_fraction = 1.0;
      } else {
        out.selection = select(std::move(c2d), std::move(c3d), out.conf_fraction, config.selector);
      }
      break;
  }
  return out;
}

struct AttributedGraph {
  ObjectGraph graph;
  std::string graph_json;
  std::vector<NodeAttributes> attributes;  // per part, pre-ordering
};

inline AttributedGraph build_attributed_graph(const SceneInput& scene,
                                              const std::vector<Part>& parts,
                                              const std::string& object_name,
                                              const FitParams& fit) {
  AttributedGraph out;
  double total_area = 0.0;
  for (const Part& p : parts) total_area += p.area_px;
  for (const Part& p : parts) {
    ShapePrimitive prim = fit_primitive(p.outline, fit);
    out.attributes.push_back(node_attributes(p, prim, scene.rgb, total_area));
  }
  out.graph = build_graph(parts, out.attributes, object_name, scene.width, scene.height);
  out.graph_json = serialize_graph(out.graph);
  return out;
}

struct RunResult {
  SelectionResult selection;
  double conf_fraction = 1.0;
  ObjectGraph graph;
  std::string graph_json;
  ReasonerTranscript transcript;
  int selected_node = -1;
  GraspPose pose;
  StageTimings timings;
  bool degenerate = false;
};

inline RunResult run_pipeline(const SceneInput& scene, const std::string& object_name,
                              const std::string& task, const PipelineConfig& pipeline_config,
                              const ReasonerConfig& reasoner_config, ChatBackend& backend) {
  detail::StageClock total;
  RunResult result;

  detail::StageClock decomp_clock;
  DecompOutcome outcome = run_decomposition(scene, pipeline_config);
  result.selection = std::move(outcome.selection);
  result.conf_fraction = outcome.conf_fraction;
  result.degenerate = result.selection.chosen.degenerate;
  result.timings.decompose_ms = decomp_clock.ms();

  detail::StageClock fit_clock;
  AttributedGraph ag = build_attributed_graph(
      scene, result.selection.chosen.parts,
      reasoner_config.include_object_name ? object_name : std::string{}, pipeline_config.fit);
  result.graph = std::move(ag.graph);
  result.graph_json = std::move(ag.graph_json);
  result.timings.fit_ms = fit_clock.ms();

  detail::StageClock reason_clock;
  result.transcript = run_chain(result.graph_json, object_name, task, reasoner_config, backend,
                                result.graph.nodes.size());
  result.selected_node = select_part(result.transcript.scores, result.graph);
  result.timings.reason_ms = reason_clock.ms();

  detail::StageClock grasp_clock;
  result.pose = compute_grasp(scene, result.selection.chosen.parts,
                              result.graph.part_of_node[result.selected_node],
                              result.selected_node);
  result.timings.grasp_ms = grasp_clock.ms();

  result.timings.total_ms = total.ms();
  return result;
}

// ---- run report ----

inline nlohmann::ordered_json decomposition_to_json(const Decomposition& d) {
  nlohmann::ordered_json j;
  j["source"] = to_string(d.source);
  j["gamma_used"] = d.gamma_used;
  j["iterations"] = d.iterations;
  j["degenerate"] = d.degenerate;
  j["part_count"] = d.parts.size();
  j["gamma_sequence"] = d.gamma_sequence;
  j["part_counts"] = d.part_counts;
  return j;
}

inline nlohmann::ordered_json pose_to_json(const GraspPose& pose) {
  nlohmann::ordered_json j;
  if (pose.position_m) {
    j["position_m"] = {pose.position_m->x, pose.position_m->y, pose.position_m->z};
  } else {
    j["position_m"] = nullptr;
  }
  j["position_px"] = {pose.position_px.x, pose.position_px.y};
  j["yaw_deg"] = pose.yaw_deg;
  j["ambiguous_yaw"] = pose.ambiguous_yaw;
  j["node"] = pose.source_node;
  return j;
}

inline nlohmann::ordered_json transcript_to_json(const ReasonerTranscript& t) {
  nlohmann::ordered_json j;
  j["stages"] = to_string(t.stages);
  j["retry_count"] = t.retry_count;
  j["exchanges"] = nlohmann::ordered_json::array();
  for (const auto& [prompt, response] : t.exchanges)
    j["exchanges"].push_back({{"prompt", prompt}, {"response", response}});
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [id, label] : t.semantics.labels) j["labels"][std::to_string(id)] = label;
  j["scores"] = nlohmann::ordered_json::object();
  for (const auto& [id, score] : t.scores.scores) j["scores"][std::to_string(id)] = score;
  j["conversation"] = nlohmann::ordered_json::array();
  for (const ChatMessage& m : t.conversation)
    j["conversation"].push_back({{"role", m.role}, {"content", m.content}});
  return j;
}

inline nlohmann::ordered_json make_run_report(const RunResult& r, const std::string& object_name,
                                              const std::string& task,
                                              const nlohmann::ordered_json& inputs_echo) {
  nlohmann::ordered_json j;
  j["version"] = kPipelineVersion;
  j["object"] = object_name;
  j["task"] = task;
  j["inputs"] = inputs_echo;
  nlohmann::ordered_json sel;
  sel["reason"] = to_string(r.selection.reason);
  sel["conf_fraction"] = r.conf_fraction;
  sel["chosen"] = decomposition_to_json(r.selection.chosen);
  if (!r.selection.rejected.parts.empty() || !r.selection.rejected.gamma_sequence.empty())
    sel["rejected"] = decomposition_to_json(r.selection.rejected);
  else
    sel["rejected"] = nullptr;
  j["selection"] = std::move(sel);
  j["degenerate"] = r.degenerate;
  j["graph"] = nlohmann::ordered_json::parse(r.graph_json);
  j["transcript"] = transcript_to_json(r.transcript);
  j["selected_node"] = r.selected_node;
  j["grasp"] = pose_to_json(r.pose);
  nlohmann::ordered_json timings;
  timings["decompose_ms"] = r.timings.decompose_ms;
  timings["fit_ms"] = r.timings.fit_ms;
  timings["reason_ms"] = r.timings.reason_ms;
  timings["grasp_ms"] = r.timings.grasp_ms;
  timings["total_ms"] = r.timings.total_ms;
  j["timings_ms"] = std::move(timings);
  return j;
}

}  // namespace shapegrasp
