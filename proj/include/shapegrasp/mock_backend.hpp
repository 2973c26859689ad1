#pragma once

// Deterministic chat backend driven by a rulebook fixture. It parses the
// graph JSON out of the conversation, looks up the object and task, and
// answers the four chain prompts consistently, so end-to-end runs are
// reproducible byte-for-byte in CI.
//
// Rulebook JSON schema:
// {
//   "strict": false,
//   "objects": {
//     "<object name>": {
//       "labels_by_rank": ["<label for node 0>", "<node 1>", ...],
//       "default_part": "<label scored highest when the task is unknown>",
//       "tasks": {
//         "<task>": {
//           "scores": {"<label>": <score>, ...},
//           "width_constrained": {            // optional gripper-width switch
//             "watch_label": "<label>",       // if this part is wider than the
//             "scores": {"<label>": <score>}  // gripper, use these instead
//           }
//         }
//       }
//     }
//   }
// }
//
// Response quality degrades with the information the prompts carry, mirroring
// how ablations hurt a real model: without the identification stage the mock
// falls back to elongation-based scores, and with scores alone it falls back
// to size-based scores.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shapegrasp/errors.hpp"
#include "shapegrasp/image.hpp"
#include "shapegrasp/reasoner.hpp"

namespace shapegrasp {

struct RulebookTask {
  std::map<std::string, double> scores;
  std::optional<std::string> width_watch_label;
  std::map<std::string, double> width_scores;
};

struct RulebookObject {
  std::vector<std::string> labels_by_rank;
  std::string default_part;
  std::map<std::string, RulebookTask> tasks;
};

struct Rulebook {
  std::map<std::string, RulebookObject> objects;
  bool strict = false;

  static Rulebook from_json(const nlohmann::json& j) {
    Rulebook rb;
    rb.strict = j.value("strict", false);
    if (!j.contains("objects") || !j.at("objects").is_object())
      throw FileFormatError("rulebook: missing \"objects\" map");
    for (const auto& [name, obj] : j.at("objects").items()) {
      RulebookObject ro;
      for (const auto& l : obj.at("labels_by_rank")) ro.labels_by_rank.push_back(l.get<std::string>());
      ro.default_part = obj.value("default_part", ro.labels_by_rank.empty() ? "" : ro.labels_by_rank.front());
      if (obj.contains("tasks")) {
        for (const auto& [task, tj] : obj.at("tasks").items()) {
          RulebookTask rt;
          for (const auto& [label, score] : tj.at("scores").items())
            rt.scores[label] = score.get<double>();
          if (tj.contains("width_constrained")) {
            const auto& wc = tj.at("width_constrained");
            rt.width_watch_label = wc.at("watch_label").get<std::string>();
            for (const auto& [label, score] : wc.at("scores").items())
              rt.width_scores[label] = score.get<double>();
          }
          ro.tasks[lower(task)] = std::move(rt);
        }
      }
      rb.objects[lower(name)] = std::move(ro);
    }
    return rb;
  }

  static Rulebook load(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(io::read_file_text(path), nullptr, false);
    if (j.is_discarded()) throw FileFormatError("rulebook: invalid JSON: " + path);
    return from_json(j);
  }

  static std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  }
};

class MockBackend : public ChatBackend {
public:
  explicit MockBackend(Rulebook rulebook) : rulebook_(std::move(rulebook)) {}

  // Makes the next n structured responses malformed, for retry-path tests.
  void inject_malformed(int n) { inject_malformed_ = n; }

  std::string complete(const std::vector<ChatMessage>& messages) override {
    if (messages.empty() || messages.back().role != "user")
      throw BackendUnavailable("mock: conversation must end with a user message");
    const std::string& request = messages.back().content;

    Context ctx = parse_context(messages);

    if (request.find(prompts::kLabelsFormMarker) != std::string::npos)
      return structured_guard([&] { return labels_response(ctx); });
    if (request.find(prompts::kScoresFormMarker) != std::string::npos)
      return structured_guard([&] { return scores_response(ctx, messages); });
    if (request.find(prompts::kIdentifyMarker) != std::string::npos)
      return identify_rationale(ctx);
    return task_rationale(ctx, messages);
  }

  std::string name() const override { return "mock"; }

private:
  struct NodeInfo {
    int id = 0;
    double area_pct = 0.0;
    double aspect = 1.0;
    double width_px = 0.0;
    std::string shape;
    std::map<std::string, std::string> extra;
  };

  struct Context {
    std::string object_name;  // empty when withheld
    std::string task;
    std::vector<NodeInfo> nodes;
    std::optional<double> gripper_width;
  };

  template <typename Fn>
  std::string structured_guard(Fn fn) {
    if (inject_malformed_ > 0) {
      --inject_malformed_;
      return "Let me think about this some more before giving the JSON.";
    }
    return fn();
  }

  static std::optional<std::string> find_quoted_task(const std::string& text) {
    const std::string marker = "task is: \"";
    std::size_t p = text.find(marker);
    if (p == std::string::npos) return std::nullopt;
    std::size_t start = p + marker.size();
    std::size_t end = text.find('"', start);
    if (end == std::string::npos) return std::nullopt;
    return text.substr(start, end - start);
  }

  Context parse_context(const std::vector<ChatMessage>& messages) const {
    Context ctx;
    for (const ChatMessage& m : messages) {
      if (m.role != "user") continue;
      if (auto task = find_quoted_task(m.content)) ctx.task = *task;

      std::size_t gp = m.content.find(prompts::kGripperPrefix);
      if (gp != std::string::npos) {
        std::istringstream ss(m.content.substr(gp + std::string(prompts::kGripperPrefix).size()));
        double w;
        if (ss >> w) ctx.gripper_width = w;
      }

      std::size_t g = m.content.find(prompts::kGraphMarker);
      if (g == std::string::npos || !ctx.nodes.empty()) continue;
      std::size_t brace = m.content.find('{', g);
      if (brace == std::string::npos) continue;
      int depth = 0;
      std::size_t end = brace;
      bool in_str = false;
      for (std::size_t i = brace; i < m.content.size(); ++i) {
        char c = m.content[i];
        if (in_str) {
          if (c == '\\')
            ++i;
          else if (c == '"')
            in_str = false;
        } else if (c == '"') {
          in_str = true;
        } else if (c == '{') {
          ++depth;
        } else if (c == '}') {
          if (--depth == 0) {
            end = i;
            break;
          }
        }
      }
      nlohmann::json graph = nlohmann::json::parse(m.content.substr(brace, end - brace + 1),
                                                   nullptr, false);
      if (graph.is_discarded()) continue;
      if (graph.contains("object") && graph.at("object").is_string())
        ctx.object_name = Rulebook::lower(graph.at("object").get<std::string>());
      for (const auto& node : graph.value("nodes", nlohmann::json::array())) {
        NodeInfo info;
        info.id = node.value("id", 0);
        info.area_pct = node.value("area_pct", 0.0);
        info.aspect = node.value("aspect_ratio", 1.0);
        info.width_px = node.value("width_px", 0.0);
        info.shape = node.value("shape", "");
        if (node.contains("extra") && node.at("extra").is_object())
          for (const auto& [k, v] : node.at("extra").items())
            if (v.is_string()) info.extra[k] = v.get<std::string>();
        ctx.nodes.push_back(std::move(info));
      }
    }
    if (ctx.nodes.empty()) throw BackendUnavailable("mock: no graph found in conversation");
    return ctx;
  }

  const RulebookObject* entry_for(const Context& ctx) const {
    auto it = rulebook_.objects.find(ctx.object_name);
    if (it == rulebook_.objects.end()) {
      if (rulebook_.strict)
        throw RulebookMissingEntry("mock rulebook has no entry for object: " +
                                   (ctx.object_name.empty() ? "<none>" : ctx.object_name));
      return nullptr;
    }
    return &it->second;
  }

  std::vector<std::string> planned_labels(const Context& ctx) const {
    const RulebookObject* obj = entry_for(ctx);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < ctx.nodes.size(); ++i) {
      if (obj && i < obj->labels_by_rank.size())
        labels.push_back(obj->labels_by_rank[i]);
      else
        labels.push_back("part_" + std::to_string(i));
    }
    return labels;
  }

  std::string identify_rationale(const Context& ctx) const {
    std::vector<std::string> labels = planned_labels(ctx);
    std::ostringstream ss;
    ss << "Looking at the graph of " << (ctx.object_name.empty() ? "the object" : ctx.object_name)
       << " with " << ctx.nodes.size() << " parts:";
    for (std::size_t i = 0; i < ctx.nodes.size(); ++i) {
      ss << " Node " << i << " is a " << ctx.nodes[i].shape << " covering "
         << ctx.nodes[i].area_pct << "% of the object, so it is most likely the " << labels[i]
         << ".";
    }
    return ss.str();
  }

  std::string task_rationale(const Context& ctx, const std::vector<ChatMessage>& messages) const {
    std::map<int, double> scores = plan_scores(ctx, messages);
    int best = 0;
    for (const auto& [id, s] : scores)
      if (s > scores[best]) best = id;
    std::ostringstream ss;
    ss << "For the task \"" << ctx.task << "\" I weigh each part's role, safety, and stability.";
    for (const NodeInfo& n : ctx.nodes) {
      auto hot = n.extra.find("hot");
      if (hot != n.extra.end()) ss << " Node " << n.id << " is marked hot and is risky to touch.";
    }
    ss << " Node " << best << " is the most suitable part to grasp.";
    return ss.str();
  }

  std::string labels_response(const Context& ctx) const {
    std::vector<std::string> labels = planned_labels(ctx);
    nlohmann::ordered_json j;
    j["labels"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) j["labels"][std::to_string(i)] = labels[i];
    return j.dump();
  }

  static bool conversation_has(const std::vector<ChatMessage>& messages, const char* marker,
                               const char* role) {
    for (const ChatMessage& m : messages)
      if (m.role == role && m.content.find(marker) != std::string::npos) return true;
    return false;
  }

  std::map<int, double> plan_scores(const Context& ctx,
                                    const std::vector<ChatMessage>& messages) const {
    const bool has_labels = conversation_has(messages, prompts::kLabelsFormMarker, "user");
    const bool has_task_reason = conversation_has(messages, prompts::kTaskReasonMarker, "user");
    const RulebookObject* obj = entry_for(ctx);

    std::map<int, double> out;

    if (has_labels && obj) {
      std::vector<std::string> labels = planned_labels(ctx);
      auto by_label = [&](const std::map<std::string, double>& table, double fallback) {
        for (std::size_t i = 0; i < ctx.nodes.size(); ++i) {
          auto it = table.find(labels[i]);
          out[static_cast<int>(i)] = it != table.end() ? it->second : fallback;
        }
      };

      if (has_task_reason) {
        auto task_it = obj->tasks.find(Rulebook::lower(ctx.task));
        if (task_it != obj->tasks.end()) {
          const RulebookTask& rt = task_it->second;
          bool width_switch = false;
          if (rt.width_watch_label && ctx.gripper_width) {
            for (std::size_t i = 0; i < ctx.nodes.size(); ++i)
              if (labels[i] == *rt.width_watch_label && ctx.nodes[i].width_px > *ctx.gripper_width)
                width_switch = true;
          }
          by_label(width_switch ? rt.width_scores : rt.scores, 0.05);
          return out;
        }
        if (rulebook_.strict)
          throw RulebookMissingEntry("mock rulebook has no task entry: " + ctx.task);
      }
      // Known object, unknown task (or task reasoning ablated): the mock only
      // knows the object's habitual grasp part.
      for (std::size_t i = 0; i < ctx.nodes.size(); ++i)
        out[static_cast<int>(i)] = labels[i] == obj->default_part ? 0.9 : 0.2;
      return out;
    }

    if (has_task_reason) {
      // No semantics assigned: prefer elongated parts, a generic geometric
      // prior for handle-like regions.
      double max_aspect = 1.0;
      for (const NodeInfo& n : ctx.nodes) max_aspect = std::max(max_aspect, n.aspect);
      for (const NodeInfo& n : ctx.nodes) {
        double s = max_aspect > 1.0 ? 0.2 + 0.6 * (n.aspect - 1.0) / (max_aspect - 1.0) : 0.5;
        out[n.id] = std::clamp(s, 0.0, 1.0);
      }
      return out;
    }

    // Scores straight from the graph: all the mock can do is prefer bulk.
    double max_area = 1e-9;
    for (const NodeInfo& n : ctx.nodes) max_area = std::max(max_area, n.area_pct);
    for (const NodeInfo& n : ctx.nodes)
      out[n.id] = std::clamp(0.2 + 0.6 * n.area_pct / max_area, 0.0, 1.0);
    return out;
  }

  std::string scores_response(const Context& ctx, const std::vector<ChatMessage>& messages) const {
    std::map<int, double> scores = plan_scores(ctx, messages);
    nlohmann::ordered_json j;
    j["scores"] = nlohmann::ordered_json::object();
    for (const auto& [id, s] : scores) j["scores"][std::to_string(id)] = std::round(s * 100.0) / 100.0;
    return j.dump();
  }

  Rulebook rulebook_;
  int inject_malformed_ = 0;
};

}  // namespace shapegrasp
