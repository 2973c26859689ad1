#include <catch2/catch_amalgamated.hpp>

#include "shapegrasp/selector.hpp"

using namespace shapegrasp;

namespace {

// Decompose stub: yields `parts_at_or_below` parts once gamma drops to the
// split threshold, else a single part.
DecomposeFn splitting_at(double split_gamma, int n_parts) {
  return [split_gamma, n_parts](double gamma) {
    std::vector<Part> parts;
    int count = gamma <= split_gamma + 1e-12 ? n_parts : 1;
    for (int i = 0; i < count; ++i) {
      Part p;
      p.area_px = 100 - i;
      parts.push_back(p);
    }
    return parts;
  };
}

Decomposition with_parts(int n, DecompSource source) {
  Decomposition d;
  d.source = source;
  for (int i = 0; i < n; ++i) d.parts.emplace_back();
  return d;
}

}  // namespace

TEST_CASE("threshold_search") {
  SelectorConfig config;

  SECTION("immediate split: zero reductions") {
    Decomposition d = threshold_search(splitting_at(0.15, 2), 0.15, config, DecompSource::TwoD);
    CHECK(d.iterations == 0);
    CHECK(d.gamma_used == Catch::Approx(0.15));
    CHECK(d.parts.size() == 2);
    CHECK_FALSE(d.degenerate);
    CHECK(d.gamma_sequence == std::vector<double>{0.15});
  }

  SECTION("screwdriver-like: split after two reductions") {
    Decomposition d = threshold_search(splitting_at(0.11, 2), 0.15, config, DecompSource::TwoD);
    CHECK(d.iterations == 2);
    CHECK(d.gamma_used == Catch::Approx(0.10));
    REQUIRE(d.gamma_sequence.size() == 3);
    CHECK(d.gamma_sequence[0] == Catch::Approx(0.15));
    CHECK(d.gamma_sequence[1] == Catch::Approx(0.125));
    CHECK(d.gamma_sequence[2] == Catch::Approx(0.10));
    CHECK(d.part_counts == std::vector<int>{1, 1, 2});
  }

  SECTION("never splits: floor reached, degenerate flag") {
    Decomposition d = threshold_search(splitting_at(-1.0, 2), 0.15, config, DecompSource::TwoD);
    CHECK(d.degenerate);
    CHECK(d.parts.size() == 1);
    CHECK(d.gamma_used == Catch::Approx(0.025));  // last step before the floor
    CHECK(d.iterations == 5);
    // Arithmetic sequence with step 0.025, never below the floor.
    for (std::size_t i = 1; i < d.gamma_sequence.size(); ++i) {
      CHECK(d.gamma_sequence[i] == Catch::Approx(d.gamma_sequence[i - 1] - 0.025));
      CHECK(d.gamma_sequence[i] >= config.gamma_floor - 1e-12);
    }
  }

  SECTION("3D initial threshold sequence") {
    Decomposition d = threshold_search(splitting_at(-1.0, 2), 0.2, config, DecompSource::ThreeD);
    REQUIRE(d.gamma_sequence.size() == 8);  // 0.2 down to 0.025
    CHECK(d.gamma_sequence.front() == Catch::Approx(0.2));
    CHECK(d.gamma_sequence.back() == Catch::Approx(0.025));
  }
}

TEST_CASE("select implements the decision table exactly") {
  SelectorConfig config;  // omega = 10, alpha = 0.85

  SECTION("3D accepted: few parts, high confidence") {
    auto r = select(with_parts(3, DecompSource::TwoD), with_parts(5, DecompSource::ThreeD), 0.90,
                    config);
    CHECK(r.chosen.source == DecompSource::ThreeD);
    CHECK(r.reason == SelectReason::Preferred3D);
    CHECK(r.rejected.source == DecompSource::TwoD);
  }

  SECTION("too many 3D parts") {
    auto r = select(with_parts(3, DecompSource::TwoD), with_parts(12, DecompSource::ThreeD), 0.95,
                    config);
    CHECK(r.chosen.source == DecompSource::TwoD);
    CHECK(r.reason == SelectReason::TooManyParts3D);
  }

  SECTION("low depth confidence") {
    auto r = select(with_parts(3, DecompSource::TwoD), with_parts(4, DecompSource::ThreeD), 0.80,
                    config);
    CHECK(r.chosen.source == DecompSource::TwoD);
    CHECK(r.reason == SelectReason::LowDepthConfidence);
  }

  SECTION("both conditions fail: part count reason wins") {
    auto r = select(with_parts(3, DecompSource::TwoD), with_parts(20, DecompSource::ThreeD), 0.10,
                    config);
    CHECK(r.chosen.source == DecompSource::TwoD);
    CHECK(r.reason == SelectReason::TooManyParts3D);
  }

  SECTION("boundary equality is inclusive on both sides") {
    auto r = select(with_parts(3, DecompSource::TwoD), with_parts(10, DecompSource::ThreeD), 0.85,
                    config);
    CHECK(r.chosen.source == DecompSource::ThreeD);
    CHECK(r.reason == SelectReason::Preferred3D);
  }

  SECTION("conf_fraction recorded") {
    auto r = select(with_parts(1, DecompSource::TwoD), with_parts(1, DecompSource::ThreeD), 0.5,
                    config);
    CHECK(r.conf_fraction == 0.5);
  }
}

TEST_CASE("selector config validation") {
  SelectorConfig config;
  config.omega = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = {};
  config.gamma_floor = 0.2;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
