#pragma once

// The two-stage, four-prompt reasoning chain over the serialized part graph:
//   P1 free-form semantic reasoning    P2 structured {"labels": {id: name}}
//   P3 free-form task reasoning        P4 structured {"scores": {id: score}}
// Structured responses are schema-validated; on failure the validation error
// is echoed back and the request retried. Backends are pluggable: an
// OpenAI-compatible HTTP endpoint or the deterministic mock used by tests and
// the benchmark suite.

#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/errors.hpp"
#include "shapegrasp/object_graph.hpp"

namespace shapegrasp {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

class ChatBackend {
public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
  virtual std::string name() const = 0;
};

enum class ChainStages { Full, SkipIdentification, SkipTaskReasoning, ScoresOnly };

inline const char* to_string(ChainStages s) {
  switch (s) {
    case ChainStages::Full: return "full";
    case ChainStages::SkipIdentification: return "no-ident";
    case ChainStages::SkipTaskReasoning: return "no-task";
    default: return "scores-only";
  }
}

inline ChainStages stages_from_string(const std::string& s) {
  if (s == "full") return ChainStages::Full;
  if (s == "no-ident") return ChainStages::SkipIdentification;
  if (s == "no-task") return ChainStages::SkipTaskReasoning;
  if (s == "scores-only") return ChainStages::ScoresOnly;
  throw ConfigError("unknown stages mode: " + s);
}

struct ReasonerConfig {
  std::string model_id = "gpt-4";
  ChainStages stages = ChainStages::Full;
  bool include_object_name = true;
  std::optional<double> max_gripper_width_px;
  std::map<std::string, std::string> extra_object_attrs;
  int max_retries = 3;
  double temperature = 0.0;

  void validate() const {
    if (max_retries < 1) throw ConfigError("reasoner: max_retries must be >= 1");
  }
};

struct SemanticAssignment {
  std::map<int, std::string> labels;
  std::string rationale;
};

struct TaskScores {
  std::map<int, double> scores;
  std::string rationale;
};

struct ReasonerTranscript {
  // One (prompt, final response) pair per executed stage.
  std::vector<std::pair<std::string, std::string>> exchanges;
  // Raw conversation including system message and retry traffic.
  std::vector<ChatMessage> conversation;
  SemanticAssignment semantics;
  TaskScores scores;
  int retry_count = 0;
  ChainStages stages = ChainStages::Full;
};

// ---- prompt templates ----
// Marker phrases are shared with the mock backend, which keys its behavior
// off them; keep them in sync when editing.

namespace prompts {

inline constexpr const char* kSystem =
    "You are an assistant for a robotic grasp planner. You reason about object "
    "parts from geometric decompositions and answer precisely.";

inline constexpr const char* kIdentifyMarker = "which semantic part";
inline constexpr const char* kTaskReasonMarker = "how suitable each part is to grasp";
inline constexpr const char* kLabelsFormMarker = "{\"labels\"";
inline constexpr const char* kScoresFormMarker = "{\"scores\"";
inline constexpr const char* kGripperPrefix = "can open at most ";
inline constexpr const char* kGraphMarker = "Graph:\n";

inline std::string graph_intro(const std::string& object_clause, std::size_t n_nodes,
                               const std::string& graph_json,
                               const std::map<std::string, std::string>& extra_attrs) {
  std::ostringstream ss;
  ss << "We are analyzing " << object_clause << " for a robot grasping system. The object was "
     << "decomposed into " << n_nodes << " basic geometric part" << (n_nodes == 1 ? "" : "s")
     << ", described by the graph below. Each node lists the part's fitted shape, its area as a "
     << "percent of the whole object, aspect ratio, orientation angle in degrees (null for "
     << "circles), centroid in image pixels, dominant color, width in pixels across its short "
     << "side, and any extra attributes. Edges connect touching parts and carry the length of "
     << "the shared boundary in pixels.\n\n"
     << kGraphMarker << graph_json << "\n";
  if (!extra_attrs.empty()) {
    ss << "\nAdditional object notes:";
    for (const auto& [k, v] : extra_attrs) ss << " " << k << "=" << v << ";";
    ss << "\n";
  }
  return ss.str();
}

inline std::string gripper_clause(const std::optional<double>& width) {
  if (!width) return "";
  std::ostringstream ss;
  ss << " The robot's gripper " << kGripperPrefix << *width
     << " pixels wide; parts wider than that cannot be grasped.";
  return ss.str();
}

inline std::string identify_freeform(const std::string& intro, const std::string& object_clause) {
  return intro + "\nThink step by step about " + kIdentifyMarker + " of " + object_clause +
         " each node most likely represents. Answer in free-form text.";
}

inline std::string identify_structured(std::size_t n_nodes) {
  std::ostringstream ss;
  ss << "Now assign exactly one semantic part name to each node. Respond with only a JSON "
     << "object of the form " << kLabelsFormMarker << ": {\"<node id>\": \"<part name>\"}} "
     << "covering every node id from 0 to " << (n_nodes - 1) << ". No other text.";
  return ss.str();
}

inline std::string task_freeform(const std::string& task, const std::optional<double>& gripper,
                                 bool semantics_known, const std::string& intro_or_empty) {
  std::ostringstream ss;
  ss << intro_or_empty;
  ss << "The robot's task is: \"" << task << "\"." << gripper_clause(gripper) << " Using the graph"
     << (semantics_known ? " and the part semantics you assigned" : "")
     << ", reason step by step about " << kTaskReasonMarker
     << " for this task. Consider the task, safety, and grasp stability. Answer in free-form "
     << "text.";
  return ss.str();
}

inline std::string scores_structured(std::size_t n_nodes, const std::string& task_or_empty,
                                     const std::optional<double>& gripper_if_inline) {
  std::ostringstream ss;
  if (!task_or_empty.empty())
    ss << "The robot's task is: \"" << task_or_empty << "\"." << gripper_clause(gripper_if_inline)
       << " ";
  ss << "Now assign a task-suitability score to each node. Scores are numbers from 0.0 "
     << "(unsuitable) to 1.0 (ideal grasp part). Respond with only a JSON object of the form "
     << kScoresFormMarker << ": {\"<node id>\": <score>}} covering every node id from 0 to "
     << (n_nodes - 1) << ". No other text.";
  return ss.str();
}

}  // namespace prompts

// ---- structured output parsing ----

namespace detail {

// Extracts the first balanced JSON object from free-form text (models often
// wrap JSON in prose or code fences).
inline std::optional<nlohmann::json> extract_json_object(const std::string& text) {
  std::size_t start = text.find('{');
  while (start != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (c == '\\')
          ++i;
        else if (c == '"')
          in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          auto parsed = nlohmann::json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (!parsed.is_discarded()) return parsed;
          break;
        }
      }
    }
    start = text.find('{', start + 1);
  }
  return std::nullopt;
}

inline nlohmann::json unwrap_field(const nlohmann::json& j, const char* field) {
  if (j.is_object() && j.contains(field)) return j.at(field);
  return j;
}

inline std::map<int, std::string> parse_labels(const std::string& text, std::size_t n_nodes) {
  auto j = extract_json_object(text);
  if (!j) throw SchemaViolation("response contains no JSON object");
  nlohmann::json body = unwrap_field(*j, "labels");
  if (!body.is_object()) throw SchemaViolation("\"labels\" must be a JSON object");
  std::map<int, std::string> out;
  for (auto& [key, value] : body.items()) {
    int id;
    try {
      id = std::stoi(key);
    } catch (...) {
      throw SchemaViolation("label key is not a node id: " + key);
    }
    if (id < 0 || id >= static_cast<int>(n_nodes))
      throw SchemaViolation("label key out of range: " + key);
    if (!value.is_string() || value.get<std::string>().empty())
      throw SchemaViolation("label for node " + key + " must be a non-empty string");
    out[id] = value.get<std::string>();
  }
  if (out.size() != n_nodes) {
    for (std::size_t i = 0; i < n_nodes; ++i)
      if (!out.count(static_cast<int>(i)))
        throw MissingNodeInResponse("no label for node " + std::to_string(i));
  }
  return out;
}

inline std::map<int, double> parse_scores(const std::string& text, std::size_t n_nodes) {
  auto j = extract_json_object(text);
  if (!j) throw SchemaViolation("response contains no JSON object");
  nlohmann::json body = unwrap_field(*j, "scores");
  if (!body.is_object()) throw SchemaViolation("\"scores\" must be a JSON object");
  std::map<int, double> out;
  for (auto& [key, value] : body.items()) {
    int id;
    try {
      id = std::stoi(key);
    } catch (...) {
      throw SchemaViolation("score key is not a node id: " + key);
    }
    if (id < 0 || id >= static_cast<int>(n_nodes))
      throw SchemaViolation("score key out of range: " + key);
    if (!value.is_number()) throw SchemaViolation("score for node " + key + " must be a number");
    double v = value.get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw SchemaViolation("score for node " + key + " must lie in [0,1]");
    out[id] = v;
  }
  if (out.size() != n_nodes) {
    for (std::size_t i = 0; i < n_nodes; ++i)
      if (!out.count(static_cast<int>(i)))
        throw MissingNodeInResponse("no score for node " + std::to_string(i));
  }
  return out;
}

}  // namespace detail

// ---- the chain ----

inline ReasonerTranscript run_chain(const std::string& graph_json, const std::string& object_name,
                                    const std::string& task, const ReasonerConfig& config,
                                    ChatBackend& backend, std::size_t n_nodes) {
  config.validate();
  if (task.empty()) throw ConfigError("run_chain: task must be non-empty");
  if (n_nodes == 0) throw ConfigError("run_chain: graph has no nodes");

  const std::string object_clause =
      config.include_object_name && !object_name.empty() ? "the " + object_name : "an object";
  const std::string intro =
      prompts::graph_intro(object_clause, n_nodes, graph_json, config.extra_object_attrs);

  ReasonerTranscript t;
  t.stages = config.stages;
  t.conversation.push_back({"system", prompts::kSystem});

  auto ask_freeform = [&](const std::string& prompt) {
    t.conversation.push_back({"user", prompt});
    std::string resp = backend.complete(t.conversation);
    t.conversation.push_back({"assistant", resp});
    t.exchanges.emplace_back(prompt, resp);
    return resp;
  };

  auto ask_structured = [&](const std::string& prompt, const char* form_marker, auto parse) {
    t.conversation.push_back({"user", prompt});
    for (int attempt = 0;; ++attempt) {
      std::string resp = backend.complete(t.conversation);
      t.conversation.push_back({"assistant", resp});
      try {
        auto parsed = parse(resp);
        t.exchanges.emplace_back(prompt, resp);
        return parsed;
      } catch (const Error& e) {
        if (attempt + 1 >= config.max_retries) throw;
        ++t.retry_count;
        t.conversation.push_back(
            {"user", std::string("Your previous response was not valid: ") + e.what() +
                         ". Respond again with only a JSON object of the form " + form_marker +
                         ": {...}}. No other text."});
      }
    }
  };

  const bool identify = config.stages == ChainStages::Full || config.stages == ChainStages::SkipTaskReasoning;
  const bool task_reason = config.stages == ChainStages::Full || config.stages == ChainStages::SkipIdentification;

  if (identify) {
    t.semantics.rationale = ask_freeform(prompts::identify_freeform(intro, object_clause));
    t.semantics.labels = ask_structured(
        prompts::identify_structured(n_nodes), prompts::kLabelsFormMarker,
        [&](const std::string& r) { return detail::parse_labels(r, n_nodes); });
  }

  if (task_reason) {
    // Without the identification stage the graph has not been shown yet.
    std::string intro_or_empty = identify ? "" : intro + "\n";
    t.scores.rationale = ask_freeform(
        prompts::task_freeform(task, config.max_gripper_width_px, identify, intro_or_empty));
    t.scores.scores = ask_structured(
        prompts::scores_structured(n_nodes, "", std::nullopt), prompts::kScoresFormMarker,
        [&](const std::string& r) { return detail::parse_scores(r, n_nodes); });
  } else {
    // Scores requested directly; the task (and graph, when nothing was shown
    // before) ride along in the single structured request.
    std::string prompt;
    if (identify) {
      prompt = prompts::scores_structured(n_nodes, task, config.max_gripper_width_px);
    } else {
      prompt = intro + "\n" + prompts::scores_structured(n_nodes, task, config.max_gripper_width_px);
    }
    t.scores.scores = ask_structured(
        prompt, prompts::kScoresFormMarker,
        [&](const std::string& r) { return detail::parse_scores(r, n_nodes); });
  }

  return t;
}

// Argmax over scores; ties break toward larger area_pct, then lower node id.
inline int select_part(const TaskScores& scores, const ObjectGraph& graph) {
  if (scores.scores.empty()) throw MissingNodeInResponse("select_part: no scores");
  int best = scores.scores.begin()->first;
  for (const auto& [id, s] : scores.scores) {
    double cur = scores.scores.at(best);
    if (s > cur + 1e-12) {
      best = id;
    } else if (std::abs(s - cur) <= 1e-12 && id != best) {
      double a_best = graph.nodes[best].area_pct;
      double a_id = graph.nodes[id].area_pct;
      if (a_id > a_best + 1e-12 || (std::abs(a_id - a_best) <= 1e-12 && id < best)) best = id;
    }
  }
  return best;
}

}  // namespace shapegrasp
