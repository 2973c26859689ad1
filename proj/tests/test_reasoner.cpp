#include <catch2/catch_amalgamated.hpp>

#include "shapegrasp/mock_backend.hpp"
#include "shapegrasp/reasoner.hpp"

using namespace shapegrasp;

namespace {

// Hand-written canonical graph for a hammer-like object: node 0 = elongated
// handle (largest), node 1 = head.
const char* kHammerGraph = R"({"object":"hammer","nodes":[)"
    R"({"id":0,"shape":"rectangle","area_pct":54.8,"aspect_ratio":6.2,"angle_deg":0.0,)"
    R"("centroid":[150.0,120.0],"color":"maroon","width_px":24.0,"extra":{}},)"
    R"({"id":1,"shape":"rectangle","area_pct":45.2,"aspect_ratio":2.5,"angle_deg":90.0,)"
    R"("centroid":[240.0,120.0],"color":"gray","width_px":36.0,"extra":{}}],)"
    R"("edges":[{"a":0,"b":1,"contact_px":24.0}]})";

const char* kBottleGraph = R"({"object":"wine bottle","nodes":[)"
    R"({"id":0,"shape":"rectangle","area_pct":84.0,"aspect_ratio":2.4,"angle_deg":90.0,)"
    R"("centroid":[160.0,150.0],"color":"green","width_px":46.0,"extra":{}},)"
    R"({"id":1,"shape":"rectangle","area_pct":16.0,"aspect_ratio":3.8,"angle_deg":90.0,)"
    R"("centroid":[160.0,65.0],"color":"green","width_px":16.0,"extra":{}}],)"
    R"("edges":[{"a":0,"b":1,"contact_px":16.0}]})";

Rulebook test_rulebook() {
  return Rulebook::load(std::string(SHAPEGRASP_DATA_DIR) + "/rulebook.json");
}

ObjectGraph graph_stub(std::vector<double> area_pcts) {
  ObjectGraph g;
  for (double a : area_pcts) {
    NodeAttributes n;
    n.area_pct = a;
    n.shape = CirclePrim{{0, 0}, 1};
    g.nodes.push_back(n);
  }
  return g;
}

// Backend with scripted responses, for validation-path tests.
class ScriptedBackend : public ChatBackend {
public:
  explicit ScriptedBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string complete(const std::vector<ChatMessage>&) override {
    if (next_ >= responses_.size()) return responses_.back();
    return responses_[next_++];
  }
  std::string name() const override { return "scripted"; }

private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

}  // namespace

TEST_CASE("run_chain full mode on the hammer graph") {
  MockBackend backend{test_rulebook()};
  ReasonerConfig config;
  ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);

  CHECK(t.exchanges.size() == 4);
  CHECK(t.retry_count == 0);
  REQUIRE(t.semantics.labels.size() == 2);
  CHECK(t.semantics.labels.at(0) == "handle");
  CHECK(t.semantics.labels.at(1) == "head");
  REQUIRE(t.scores.scores.size() == 2);
  CHECK(t.scores.scores.at(1) > t.scores.scores.at(0));

  ObjectGraph g = graph_stub({54.8, 45.2});
  CHECK(select_part(t.scores, g) == 1);  // the head
}

TEST_CASE("stage gating") {
  MockBackend backend{test_rulebook()};
  ReasonerConfig config;

  SECTION("scores-only: single exchange, no labels") {
    config.stages = ChainStages::ScoresOnly;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.exchanges.size() == 1);
    CHECK(t.semantics.labels.empty());
    CHECK(t.scores.scores.size() == 2);
  }

  SECTION("no-ident: two exchanges, prompts carry no part names") {
    config.stages = ChainStages::SkipIdentification;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.exchanges.size() == 2);
    CHECK(t.semantics.labels.empty());
    for (const ChatMessage& m : t.conversation) {
      if (m.role != "user") continue;
      CHECK(m.content.find("\"handle\"") == std::string::npos);
      CHECK(m.content.find("\"head\"") == std::string::npos);
    }
  }

  SECTION("no-task: three exchanges, labels but no task-reasoning prompt") {
    config.stages = ChainStages::SkipTaskReasoning;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.exchanges.size() == 3);
    CHECK(t.semantics.labels.size() == 2);
    for (const ChatMessage& m : t.conversation) {
      if (m.role != "user") continue;
      CHECK(m.content.find(prompts::kTaskReasonMarker) == std::string::npos);
    }
  }
}

TEST_CASE("schema validation and retry") {
  SECTION("one malformed response then success") {
    MockBackend backend{test_rulebook()};
    backend.inject_malformed(1);
    ReasonerConfig config;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.retry_count == 1);
    CHECK(t.semantics.labels.size() == 2);
  }

  SECTION("persistent malformed output exhausts retries") {
    MockBackend backend{test_rulebook()};
    backend.inject_malformed(10);
    ReasonerConfig config;
    config.max_retries = 3;
    CHECK_THROWS_AS(run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2),
                    SchemaViolation);
  }

  SECTION("missing node in an otherwise valid response") {
    ScriptedBackend backend({R"(free-form reasoning)", R"({"labels": {"0": "handle"}})"});
    ReasonerConfig config;
    config.max_retries = 1;
    CHECK_THROWS_AS(run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2),
                    MissingNodeInResponse);
  }

  SECTION("out-of-range score is rejected then repaired") {
    ScriptedBackend backend({R"({"scores": {"0": 1.7, "1": 0.4}})",
                             R"({"scores": {"0": 0.9, "1": 0.4}})"});
    ReasonerConfig config;
    config.stages = ChainStages::ScoresOnly;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.retry_count == 1);
    CHECK(t.scores.scores.at(0) == Catch::Approx(0.9));
  }

  SECTION("JSON inside prose is extracted") {
    ScriptedBackend backend(
        {"Sure! Here you go:\n```json\n{\"scores\": {\"0\": 0.2, \"1\": 0.8}}\n```\nDone."});
    ReasonerConfig config;
    config.stages = ChainStages::ScoresOnly;
    ReasonerTranscript t = run_chain(kHammerGraph, "hammer", "hand it over", config, backend, 2);
    CHECK(t.scores.scores.at(1) == Catch::Approx(0.8));
  }
}

TEST_CASE("select_part") {
  ObjectGraph g = graph_stub({60.0, 40.0, 20.0});

  SECTION("argmax") {
    TaskScores s;
    s.scores = {{0, 0.2}, {1, 0.9}, {2, 0.5}};
    CHECK(select_part(s, g) == 1);
  }

  SECTION("tie broken by larger area") {
    TaskScores s;
    s.scores = {{0, 0.5}, {1, 0.5}, {2, 0.1}};
    CHECK(select_part(s, g) == 0);
  }

  SECTION("uniform scores pick the largest part") {
    TaskScores s;
    s.scores = {{0, 0.4}, {1, 0.4}, {2, 0.4}};
    CHECK(select_part(s, g) == 0);
  }

  SECTION("argmax invariant to positive scaling") {
    TaskScores s;
    s.scores = {{0, 0.3}, {1, 0.8}, {2, 0.6}};
    int before = select_part(s, g);
    TaskScores scaled;
    for (auto [id, v] : s.scores) scaled.scores[id] = v * 0.5;
    CHECK(select_part(scaled, g) == before);
  }
}

TEST_CASE("mock rulebook behaviors") {
  MockBackend backend{test_rulebook()};
  ReasonerConfig config;

  SECTION("knife + cut: handle wins over blade") {
    const char* graph = R"({"object":"knife","nodes":[)"
        R"({"id":0,"shape":"rectangle","area_pct":67.0,"aspect_ratio":2.1,"angle_deg":0.0,)"
        R"("centroid":[85.0,120.0],"color":"black","width_px":34.0,"extra":{}},)"
        R"({"id":1,"shape":"isosceles_triangle","area_pct":33.0,"aspect_ratio":7.2,"angle_deg":0.0,)"
        R"("centroid":[165.0,120.0],"color":"silver","width_px":18.0,"extra":{}}],)"
        R"("edges":[{"a":0,"b":1,"contact_px":18.0}]})";
    ReasonerTranscript t = run_chain(graph, "knife", "cut", config, backend, 2);
    CHECK(t.semantics.labels.at(0) == "handle");
    CHECK(t.semantics.labels.at(1) == "blade");
    CHECK(t.scores.scores.at(0) == Catch::Approx(0.95));
    CHECK(t.scores.scores.at(1) == Catch::Approx(0.1));
  }

  SECTION("wine bottle switches to the neck under a narrow gripper") {
    ReasonerTranscript wide = run_chain(kBottleGraph, "wine bottle", "pick it up", config,
                                        backend, 2);
    CHECK(wide.scores.scores.at(0) > wide.scores.scores.at(1));  // body preferred

    ReasonerConfig narrow = config;
    narrow.max_gripper_width_px = 30.0;  // body width 46 exceeds this
    ReasonerTranscript t = run_chain(kBottleGraph, "wine bottle", "pick it up", narrow,
                                     backend, 2);
    CHECK(t.scores.scores.at(1) > t.scores.scores.at(0));  // neck wins
  }

  SECTION("hot soldering iron is handed over by the handle") {
    const char* graph = R"({"object":"soldering iron","nodes":[)"
        R"({"id":0,"shape":"rectangle","area_pct":68.0,"aspect_ratio":3.1,"angle_deg":0.0,)"
        R"("centroid":[80.0,120.0],"color":"blue","width_px":26.0,"extra":{}},)"
        R"({"id":1,"shape":"rectangle","area_pct":32.0,"aspect_ratio":6.0,"angle_deg":0.0,)"
        R"("centroid":[170.0,120.0],"color":"silver","width_px":12.0,"extra":{"hot":"yes"}}],)"
        R"("edges":[{"a":0,"b":1,"contact_px":12.0}]})";
    ReasonerConfig hot = config;
    hot.extra_object_attrs = {{"hot", "yes"}};
    ReasonerTranscript t = run_chain(graph, "soldering iron", "hand it over", hot, backend, 2);
    CHECK(t.semantics.labels.at(0) == "handle");
    CHECK(select_part(t.scores, graph_stub({68.0, 32.0})) == 0);
  }

  SECTION("unknown object falls back to generic labels") {
    const char* graph = R"({"object":null,"nodes":[)"
        R"({"id":0,"shape":"rectangle","area_pct":70.0,"aspect_ratio":4.0,"angle_deg":0.0,)"
        R"("centroid":[100.0,100.0],"color":"gray","width_px":20.0,"extra":{}},)"
        R"({"id":1,"shape":"circle","area_pct":30.0,"aspect_ratio":1.0,"angle_deg":null,)"
        R"("centroid":[150.0,100.0],"color":"gray","width_px":30.0,"extra":{}}],)"
        R"("edges":[]})";
    ReasonerConfig no_name = config;
    no_name.include_object_name = false;
    ReasonerTranscript t = run_chain(graph, "hammer", "hand it over", no_name, backend, 2);
    CHECK(t.semantics.labels.at(0) == "part_0");
    bool an_object_mentioned = false;
    for (const ChatMessage& m : t.conversation)
      if (m.role == "user" && m.content.find("an object") != std::string::npos)
        an_object_mentioned = true;
    CHECK(an_object_mentioned);
  }

  SECTION("deterministic transcripts") {
    MockBackend b1{test_rulebook()}, b2{test_rulebook()};
    ReasonerTranscript t1 = run_chain(kHammerGraph, "hammer", "hand it over", config, b1, 2);
    ReasonerTranscript t2 = run_chain(kHammerGraph, "hammer", "hand it over", config, b2, 2);
    REQUIRE(t1.conversation.size() == t2.conversation.size());
    for (std::size_t i = 0; i < t1.conversation.size(); ++i)
      CHECK(t1.conversation[i].content == t2.conversation[i].content);
  }

  SECTION("strict mode raises on rulebook misses") {
    Rulebook rb = test_rulebook();
    rb.strict = true;
    MockBackend strict{rb};
    const char* graph = R"({"object":"gizmo","nodes":[)"
        R"({"id":0,"shape":"circle","area_pct":100.0,"aspect_ratio":1.0,"angle_deg":null,)"
        R"("centroid":[10.0,10.0],"color":"red","width_px":10.0,"extra":{}}],"edges":[]})";
    ReasonerConfig cfg;
    CHECK_THROWS_AS(run_chain(graph, "gizmo", "poke it", cfg, strict, 1), RulebookMissingEntry);
  }
}
