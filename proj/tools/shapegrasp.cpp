// shapegrasp CLI: run the full grasp-planning pipeline on a segmented scene,
// inspect decompositions, drive the synthetic benchmark, or generate fixture
// scenes. Errors are reported as one JSON object on stderr with a stable
// "kind" tag; exit codes: 0 success, 1 error, 2 degenerate decomposition
// (single part at the gamma floor; a pose is still emitted).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "shapegrasp/bench.hpp"
#include "shapegrasp/http_backend.hpp"
#include "shapegrasp/mock_backend.hpp"
#include "shapegrasp/pipeline.hpp"

namespace sg = shapegrasp;

namespace {

struct CommonOpts {
  std::string mode = "auto";
  std::string backend = "mock";
  std::string rulebook;
  std::string stages = "full";
  bool no_object_name = false;
  double epsilon_pct = 2.0;
  double max_gripper_width = 0.0;  // 0 = unset
  sg::SelectorConfig selector;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--mode", o.mode, "Decomposition route: auto, 2d, or 3d")
      ->check(CLI::IsMember({"auto", "2d", "3d"}));
  cmd->add_option("--backend", o.backend, "Reasoning backend")
      ->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--rulebook", o.rulebook, "Rulebook JSON for the mock backend");
  cmd->add_option("--stages", o.stages, "Reasoning stages to run")
      ->check(CLI::IsMember({"full", "scores-only", "no-ident", "no-task"}));
  cmd->add_flag("--no-object-name", o.no_object_name, "Withhold the object name from prompts");
  cmd->add_option("--epsilon-pct", o.epsilon_pct,
                  "Polygon simplification epsilon, percent of hull perimeter");
  cmd->add_option("--max-gripper-width", o.max_gripper_width,
                  "Gripper opening limit in pixels (0 = unconstrained)");
  cmd->add_option("--omega", o.selector.omega, "Max part count for the 3D decomposition");
  cmd->add_option("--alpha", o.selector.alpha, "Min confident-depth fraction for 3D");
  cmd->add_option("--gamma-2d", o.selector.gamma_init_2d, "Initial 2D concavity threshold");
  cmd->add_option("--gamma-3d", o.selector.gamma_init_3d, "Initial 3D concavity threshold");
  cmd->add_option("--gamma-step", o.selector.gamma_step, "Threshold search step");
  cmd->add_option("--gamma-floor", o.selector.gamma_floor, "Threshold search floor");
  cmd->set_config("--config", "", "Config file (key=value lines; flags take precedence)");
}

sg::PipelineConfig make_pipeline_config(const CommonOpts& o) {
  sg::PipelineConfig cfg;
  cfg.mode = sg::mode_from_string(o.mode);
  cfg.selector = o.selector;
  cfg.fit.epsilon_pct = o.epsilon_pct;
  return cfg;
}

sg::ReasonerConfig make_reasoner_config(const CommonOpts& o) {
  sg::ReasonerConfig cfg;
  cfg.stages = sg::stages_from_string(o.stages);
  cfg.include_object_name = !o.no_object_name;
  if (o.max_gripper_width > 0) cfg.max_gripper_width_px = o.max_gripper_width;
  const char* model = std::getenv("SHAPEGRASP_MODEL");
  if (model && *model) cfg.model_id = model;
  return cfg;
}

std::unique_ptr<sg::ChatBackend> make_backend(const CommonOpts& o) {
  if (o.backend == "mock") {
    if (o.rulebook.empty())
      throw sg::ConfigError("the mock backend needs --rulebook <file.json>");
    return std::make_unique<sg::MockBackend>(sg::Rulebook::load(o.rulebook));
  }
  return sg::make_http_backend_from_env();
}

void emit_error(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

void write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    sg::io::write_file_text(out_path, text + "\n");
  }
}

// ---- run ----

struct RunOpts {
  std::string mask, rgb, depth, conf, intrinsics;
  std::string object, task;
  std::string out, svg;
  CommonOpts common;
};

int cmd_run(const RunOpts& o) {
  sg::SceneInput scene = sg::load_scene(o.mask, o.depth, o.conf, o.rgb, o.intrinsics);
  auto backend = make_backend(o.common);
  sg::PipelineConfig pcfg = make_pipeline_config(o.common);
  sg::ReasonerConfig rcfg = make_reasoner_config(o.common);

  sg::RunResult result = sg::run_pipeline(scene, o.object, o.task, pcfg, rcfg, *backend);

  nlohmann::ordered_json inputs;
  inputs["mask"] = o.mask;
  inputs["rgb"] = o.rgb;
  inputs["depth"] = o.depth.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(o.depth);
  inputs["confidence"] = o.conf.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(o.conf);
  inputs["intrinsics"] = o.intrinsics.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(o.intrinsics);
  inputs["mode"] = o.common.mode;
  inputs["backend"] = backend->name();
  inputs["stages"] = o.common.stages;

  nlohmann::ordered_json report = sg::make_run_report(result, o.object, o.task, inputs);
  write_or_print(o.out, report.dump(2));

  if (!o.svg.empty())
    sg::io::write_file_text(o.svg, sg::render_overlay(result.graph, result.selection.chosen.parts,
                                                      result.selected_node));
  return result.degenerate ? 2 : 0;
}

// ---- decompose ----

struct DecomposeOpts {
  std::string mask, rgb, depth, conf, intrinsics;
  std::string out, svg;
  CommonOpts common;
};

int cmd_decompose(const DecomposeOpts& o) {
  sg::SceneInput scene = sg::load_scene(o.mask, o.depth, o.conf, o.rgb, o.intrinsics);
  sg::PipelineConfig pcfg = make_pipeline_config(o.common);

  sg::DecompOutcome outcome = sg::run_decomposition(scene, pcfg);

  if (pcfg.mode == sg::PipelineMode::ThreeD && outcome.three_d_ran) {
    bool parts_ok =
        static_cast<int>(outcome.selection.chosen.parts.size()) <= pcfg.selector.omega;
    bool conf_ok = outcome.conf_fraction >= pcfg.selector.alpha;
    if (!parts_ok || !conf_ok) {
      nlohmann::ordered_json warn;
      warn["warning"] = std::string("auto mode would reject the 3D decomposition (") +
                        (!parts_ok ? "too many parts" : "low depth confidence") + ")";
      std::cerr << warn.dump() << "\n";
    }
  }

  sg::AttributedGraph ag = sg::build_attributed_graph(scene, outcome.selection.chosen.parts,
                                                      std::string{}, pcfg.fit);

  nlohmann::ordered_json j;
  j["version"] = sg::kPipelineVersion;
  j["reason"] = sg::to_string(outcome.selection.reason);
  j["conf_fraction"] = outcome.conf_fraction;
  j["chosen"] = sg::decomposition_to_json(outcome.selection.chosen);
  if (!outcome.selection.rejected.gamma_sequence.empty())
    j["rejected"] = sg::decomposition_to_json(outcome.selection.rejected);
  else
    j["rejected"] = nullptr;
  j["graph"] = nlohmann::ordered_json::parse(ag.graph_json);
  write_or_print(o.out, j.dump(2));

  if (!o.svg.empty())
    sg::io::write_file_text(o.svg, sg::render_overlay(ag.graph, outcome.selection.chosen.parts));
  return outcome.selection.chosen.degenerate ? 2 : 0;
}

// ---- bench ----

struct BenchOpts {
  std::string suite;
  std::string out;
  std::string sweep;  // "start:end:step"
  std::vector<std::string> sweep_objects;
  CommonOpts common;
};

int cmd_bench(const BenchOpts& o) {
  sg::Suite suite = sg::Suite::load(o.suite);
  sg::PipelineConfig pcfg = make_pipeline_config(o.common);

  nlohmann::ordered_json out_json;

  if (!o.sweep.empty()) {
    double lo, hi, step;
    if (std::sscanf(o.sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw sg::ConfigError("--sweep expects start:end:step");
    std::vector<double> gammas;
    for (double g = lo; g <= hi + 1e-12; g += step) gammas.push_back(g);

    out_json["sweeps"] = nlohmann::ordered_json::array();
    for (const auto& spec : suite.objects) {
      if (!o.sweep_objects.empty() &&
          std::find(o.sweep_objects.begin(), o.sweep_objects.end(), spec.name) ==
              o.sweep_objects.end())
        continue;
      auto rows = sg::sweep_thresholds(spec, gammas, pcfg, suite.seed);
      nlohmann::ordered_json sj;
      sj["object"] = spec.name;
      sj["rows"] = nlohmann::ordered_json::array();
      for (const auto& r : rows)
        sj["rows"].push_back({{"gamma", r.gamma}, {"parts_2d", r.parts_2d}, {"parts_3d", r.parts_3d}});
      out_json["sweeps"].push_back(std::move(sj));
      std::cout << sg::render_sweep_table(spec.name, rows);
    }
  } else {
    auto backend = make_backend(o.common);
    sg::ReasonerConfig rcfg = make_reasoner_config(o.common);
    sg::EvalReport report = sg::evaluate(suite, pcfg, rcfg, *backend);
    out_json = sg::eval_report_to_json(report);
    std::cout << sg::render_eval_table(report);
  }

  if (!o.out.empty()) sg::io::write_file_text(o.out, out_json.dump(2) + "\n");
  return 0;
}

// ---- gen ----

struct GenOpts {
  std::string suite;
  std::string object;
  std::string out_dir = ".";
  std::uint64_t seed = 0;  // 0 -> suite seed
};

int cmd_gen(const GenOpts& o) {
  sg::Suite suite = sg::Suite::load(o.suite);
  std::uint64_t seed = o.seed ? o.seed : suite.seed;
  bool any = false;
  for (const auto& spec : suite.objects) {
    if (!o.object.empty() && spec.name != o.object) continue;
    any = true;
    sg::GeneratedScene gen = sg::generate(spec, seed);
    std::string dir = o.out_dir + "/" + spec.name;
    sg::ScenePaths paths = sg::write_scene(gen.scene, dir);
    std::cout << spec.name << ": " << paths.mask << " " << paths.rgb << " " << paths.depth << " "
              << paths.confidence << " " << paths.intrinsics << "\n";
  }
  if (!any) throw sg::ConfigError("no suite object named: " + o.object);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-oriented grasp planning from shape decomposition"};
  app.require_subcommand(1);

  RunOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "Run the full pipeline on one scene");
  run->add_option("--mask", run_opts.mask, "Object mask (PNG/PGM)")->required();
  run->add_option("--rgb", run_opts.rgb, "Color image (PNG/PPM)")->required();
  run->add_option("--object", run_opts.object, "Object name")->required();
  run->add_option("--task", run_opts.task, "Task description")->required();
  run->add_option("--depth", run_opts.depth, "Depth raster (PFM or raw+sidecar), meters");
  run->add_option("--conf", run_opts.conf, "Depth confidence raster, [0,1]");
  run->add_option("--intrinsics", run_opts.intrinsics, "Camera intrinsics JSON");
  run->add_option("--out", run_opts.out, "Write the run report JSON here");
  run->add_option("--svg", run_opts.svg, "Write an SVG overlay here");
  add_common_flags(run, run_opts.common);

  DecomposeOpts dec_opts;
  CLI::App* dec = app.add_subcommand("decompose", "Decompose a scene without reasoning");
  dec->add_option("--mask", dec_opts.mask, "Object mask (PNG/PGM)")->required();
  dec->add_option("--rgb", dec_opts.rgb, "Color image (PNG/PPM)")->required();
  dec->add_option("--depth", dec_opts.depth, "Depth raster");
  dec->add_option("--conf", dec_opts.conf, "Depth confidence raster");
  dec->add_option("--intrinsics", dec_opts.intrinsics, "Camera intrinsics JSON");
  dec->add_option("--out", dec_opts.out, "Write the decomposition JSON here");
  dec->add_option("--svg", dec_opts.svg, "Write an SVG overlay here");
  add_common_flags(dec, dec_opts.common);

  BenchOpts bench_opts;
  CLI::App* bench = app.add_subcommand("bench", "Evaluate the synthetic suite");
  bench->add_option("--suite", bench_opts.suite, "Suite JSON")->required();
  bench->add_option("--out", bench_opts.out, "Write the evaluation report JSON here");
  bench->add_option("--sweep", bench_opts.sweep, "Threshold sweep start:end:step (skips reasoning)");
  bench->add_option("--sweep-object", bench_opts.sweep_objects,
                    "Restrict the sweep to these objects (repeatable)");
  add_common_flags(bench, bench_opts.common);

  GenOpts gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "Write suite scenes as input files");
  gen->add_option("--suite", gen_opts.suite, "Suite JSON")->required();
  gen->add_option("--object", gen_opts.object, "Only this object (default: all)");
  gen->add_option("--out-dir", gen_opts.out_dir, "Output directory");
  gen->add_option("--seed", gen_opts.seed, "Override the suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("UsageError", e.what());
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (dec->parsed()) return cmd_decompose(dec_opts);
    if (bench->parsed()) return cmd_bench(bench_opts);
    if (gen->parsed()) return cmd_gen(gen_opts);
  } catch (const sg::Error& e) {
    emit_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("InternalError", e.what());
    return 1;
  }
  return 0;
}
