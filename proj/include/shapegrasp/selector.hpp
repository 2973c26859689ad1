#pragma once

// Dynamic threshold search plus the 2D-vs-3D decomposition selector.
// The search lowers gamma in fixed steps until the decomposition yields more
// than one part; the selector keeps the 3D result only when its part count
// stays at or below omega and the depth-confidence fraction reaches alpha.

#include <functional>
#include <utility>

#include "shapegrasp/decomposition.hpp"
#include "shapegrasp/errors.hpp"

namespace shapegrasp {

struct SelectorConfig {
  double gamma_init_2d = 0.15;
  double gamma_init_3d = 0.2;
  double gamma_step = 0.025;
  double gamma_floor = 0.01;
  int omega = 10;        // max 3D part count
  double alpha = 0.85;   // min confident-depth fraction

  void validate() const {
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in01(gamma_init_2d) || !in01(gamma_init_3d) || !in01(gamma_step) || !in01(gamma_floor))
      throw ConfigError("selector: gamma parameters must lie in (0,1)");
    if (gamma_floor >= gamma_init_2d || gamma_floor >= gamma_init_3d)
      throw ConfigError("selector: gamma_floor must be below the initial thresholds");
    if (omega < 1) throw ConfigError("selector: omega must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("selector: alpha must lie in (0,1]");
  }
};

using DecomposeFn = std::function<std::vector<Part>(double gamma)>;

// Runs decompose_fn at gamma_init, gamma_init - step, ... until the result
// has at least two parts or the next step would drop below gamma_floor.
// A single-part result at the floor is returned flagged degenerate.
inline Decomposition threshold_search(const DecomposeFn& decompose_fn, double gamma_init,
                                      const SelectorConfig& config, DecompSource source) {
  config.validate();
  Decomposition result;
  result.source = source;

  double gamma = gamma_init;
  int reductions = 0;
  while (true) {
    std::vector<Part> parts = decompose_fn(gamma);
    result.gamma_sequence.push_back(gamma);
    result.part_counts.push_back(static_cast<int>(parts.size()));
    result.parts = std::move(parts);
    result.gamma_used = gamma;
    result.iterations = reductions;
    if (result.parts.size() >= 2) {
      result.degenerate = false;
      return result;
    }
    double next = gamma - config.gamma_step;
    if (next < config.gamma_floor - 1e-12) {
      result.degenerate = true;
      return result;
    }
    gamma = next;
    ++reductions;
  }
}

enum class SelectReason { Preferred3D, TooManyParts3D, LowDepthConfidence, Forced2D };

inline const char* to_string(SelectReason r) {
  switch (r) {
    case SelectReason::Preferred3D: return "preferred_3d";
    case SelectReason::TooManyParts3D: return "too_many_parts_3d";
    case SelectReason::LowDepthConfidence: return "low_depth_confidence";
    default: return "forced_2d";
  }
}

struct SelectionResult {
  Decomposition chosen;
  Decomposition rejected;
  SelectReason reason = SelectReason::Forced2D;
  double conf_fraction = 0.0;
};

// The heuristic h(C_2D, C_3D): 3D wins iff |C_3D| <= omega AND conf >= alpha
// (both inclusive); otherwise 2D. When both conditions fail the part-count
// reason is reported.
inline SelectionResult select(Decomposition c2d, Decomposition c3d, double conf_fraction,
                              const SelectorConfig& config) {
  config.validate();
  SelectionResult out;
  out.conf_fraction = conf_fraction;
  bool parts_ok = static_cast<int>(c3d.parts.size()) <= config.omega;
  bool conf_ok = conf_fraction >= config.alpha;
  if (parts_ok && conf_ok) {
    out.reason = SelectReason::Preferred3D;
    out.chosen = std::move(c3d);
    out.rejected = std::move(c2d);
  } else {
    out.reason = parts_ok ? SelectReason::LowDepthConfidence : SelectReason::TooManyParts3D;
    out.chosen = std::move(c2d);
    out.rejected = std::move(c3d);
  }
  return out;
}

}  // namespace shapegrasp
