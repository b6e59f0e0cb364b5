#include <doctest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "stp/pipeline.hpp"
#include "stp/scenario.hpp"

using namespace stp;

namespace {

Scenario make_scenario(int frames, int objects, std::uint64_t seed, bool enter_exit = false) {
  GeneratorParams p;
  p.frames = frames;
  p.objects = objects;
  p.seed = seed;
  p.enter_exit = enter_exit;
  p.min_lifetime = std::min(10, std::max(frames, 1));
  return generate_scenario(p);
}

PipelineConfig config_for(StrategyKind kind) {
  PipelineConfig cfg;
  cfg.strategy.kind = kind;
  return cfg;
}

}  // namespace

TEST_CASE("single frame with every tile processed finds every object") {
  Scenario s;
  s.frame_w = 960;
  s.frame_h = 544;
  s.frames.push_back(ScenarioFrame{0, {{1, Box{100, 100, 12, 30}}, {2, Box{500, 300, 15, 25}},
                                       {3, Box{900, 500, 20, 30}}}});
  OracleDetector det(DetectorModel{});
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 352}), config_for(StrategyKind::TA), det);
  REQUIRE(run.frames.size() == 1);
  CHECK(run.summary.true_positives == 3);
  CHECK(run.summary.false_negatives == 0);
  CHECK(run.summary.false_positives == 0);
  CHECK(run.summary.sen == 1.0);
  CHECK(run.frames[0].selected_tiles.size() == 6);
  CHECK(run.frames[0].processing_time == doctest::Approx(6 * 0.025));
}

TEST_CASE("empty scenario has no metrics") {
  Scenario s;
  s.frame_w = 960;
  s.frame_h = 544;
  OracleDetector det(DetectorModel{});
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 352}), config_for(StrategyKind::TSM), det);
  CHECK(run.frames.empty());
  CHECK_FALSE(run.summary.sen.has_value());
  CHECK_FALSE(run.summary.apt.has_value());
  CHECK(det.invocations() == 0);
}

TEST_CASE("frame size mismatch is rejected") {
  OracleDetector det(DetectorModel{});
  Pipeline p(compute_grid({960, 544, 352}), config_for(StrategyKind::TA), det);
  CHECK_THROWS_AS(p.run_frame(ScenarioFrame{0, {}}, 1280, 720), std::invalid_argument);
}

TEST_CASE("identical runs give identical results") {
  const Scenario s = make_scenario(40, 12, 21, true);
  DetectorModel m;
  m.miss_rate = 0.25;
  m.position_noise = 3.0;
  m.rng_seed = 17;
  for (StrategyKind kind : {StrategyKind::TA, StrategyKind::T1, StrategyKind::TO, StrategyKind::TSM}) {
    PipelineConfig cfg = config_for(kind);
    cfg.strategy.budget_n = 3;
    const TileGrid g = compute_grid({960, 544, 256});
    OracleDetector d1(m);
    OracleDetector d2(m);
    const ScenarioRun a = run_scenario(s, g, cfg, d1);
    const ScenarioRun b = run_scenario(s, g, cfg, d2);
    CHECK(a.summary == b.summary);
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
      CHECK(a.frames[i].selected_tiles == b.frames[i].selected_tiles);
      REQUIRE(a.frames[i].detections.size() == b.frames[i].detections.size());
      for (std::size_t k = 0; k < a.frames[i].detections.size(); ++k) {
        CHECK(a.frames[i].detections[k].box == b.frames[i].detections[k].box);
      }
    }
  }
}

TEST_CASE("reset makes a pipeline reusable") {
  const Scenario s = make_scenario(15, 6, 2);
  OracleDetector det(DetectorModel{});
  Pipeline p(compute_grid({960, 544, 352}), config_for(StrategyKind::T1), det);
  std::vector<std::vector<std::size_t>> first;
  for (const auto& f : s.frames) first.push_back(p.run_frame(f, 960, 544).selected_tiles);
  p.reset();
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    CHECK(p.run_frame(s.frames[i], 960, 544).selected_tiles == first[i]);
  }
}

TEST_CASE("processing time and detector calls follow the selection") {
  const Scenario s = make_scenario(30, 10, 4);
  DetectorModel m;
  m.per_tile_latency = 0.125;
  const TileGrid g = compute_grid({960, 544, 256});
  double previous = -1.0;
  for (StrategyKind kind : {StrategyKind::T1, StrategyKind::TSM, StrategyKind::TA}) {
    PipelineConfig cfg = config_for(kind);
    cfg.strategy.budget_n = 4;
    cfg.frame_overhead = 0.25;
    OracleDetector det(m);
    const ScenarioRun run = run_scenario(s, g, cfg, det);
    long long selected = 0;
    for (const FrameResult& f : run.frames) {
      CHECK(f.processing_time == f.selected_tiles.size() * 0.125 + 0.25);
      CHECK(f.detector_calls == static_cast<int>(f.selected_tiles.size()));
      selected += static_cast<long long>(f.selected_tiles.size());
    }
    CHECK(det.invocations() == static_cast<std::uint64_t>(selected));
    CHECK(run.summary.detector_calls == selected);
    REQUIRE(run.summary.apt.has_value());
    CHECK(*run.summary.apt > previous);
    previous = *run.summary.apt;
  }
}

TEST_CASE("round robin visits tile f mod N on frame f") {
  const Scenario s = make_scenario(25, 5, 9);
  OracleDetector det(DetectorModel{});
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 352}), config_for(StrategyKind::T1), det);
  for (std::size_t f = 0; f < run.frames.size(); ++f) {
    CHECK(run.frames[f].selected_tiles == std::vector<std::size_t>{f % 6});
  }
}

TEST_CASE("TSM picks the top tiles of the statistics it saw") {
  const Scenario s = make_scenario(50, 14, 33, true);
  DetectorModel m;
  m.miss_rate = 0.2;
  m.position_noise = 2.0;
  OracleDetector det(m);
  PipelineConfig cfg = config_for(StrategyKind::TSM);
  cfg.strategy.budget_n = 4;
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 256}), cfg, det);
  for (const FrameResult& f : run.frames) {
    std::vector<oracle::RawStats> raw;
    for (const TileStats& t : f.selection_stats) {
      raw.push_back({double(t.objects), t.cum_iou, double(t.not_selected),
                     double(t.frames_since_detection)});
    }
    CHECK(f.selected_tiles == oracle::ref_top_n(oracle::ref_tile_values(raw), 4));
  }
}

TEST_CASE("fused output never holds two boxes at or above the dedup threshold") {
  const Scenario s = make_scenario(30, 14, 12);
  DetectorModel m;
  m.position_noise = 4.0;
  m.miss_rate = 0.1;
  OracleDetector det(m);
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 256}), config_for(StrategyKind::TA), det);
  for (const FrameResult& f : run.frames) {
    for (std::size_t i = 0; i < f.detections.size(); ++i) {
      for (std::size_t j = i + 1; j < f.detections.size(); ++j) {
        CHECK(iou(f.detections[i].box, f.detections[j].box) < 0.5);
      }
    }
  }
}

TEST_CASE("dedup keeps the more confident box") {
  const std::vector<OutputBox> boxes{{Box{0, 0, 10, 10, 0.7}, 1}, {Box{1, 0, 10, 10, 0.9}, 0},
                                     {Box{50, 50, 10, 10, 0.8}, 2}};
  const auto kept = dedup_boxes(boxes, 0.5);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].box.confidence == 0.9);
  CHECK(kept[1].box.x == 50);
}

TEST_CASE("without memory only the processed tiles report") {
  const Scenario s = make_scenario(12, 10, 6);
  OracleDetector det(DetectorModel{});
  PipelineConfig cfg = config_for(StrategyKind::T1);
  cfg.memory_enabled = false;
  const ScenarioRun run = run_scenario(s, compute_grid({960, 544, 352}), cfg, det);
  for (const FrameResult& f : run.frames) {
    for (const OutputBox& b : f.detections) CHECK(b.tile == f.selected_tiles.front());
  }
}

TEST_CASE("perfect oracle with every tile processed reaches full sensitivity") {
  for (int cnn : {544, 352, 256}) {
    const Scenario s = make_scenario(30, 16, std::uint64_t(cnn), true);
    OracleDetector det(DetectorModel{});
    const ScenarioRun run = run_scenario(s, compute_grid({960, 544, cnn}), config_for(StrategyKind::TA), det);
    CAPTURE(cnn);
    CHECK(run.summary.sen == 1.0);
  }
}

TEST_CASE("invalid configuration is rejected at construction") {
  OracleDetector det(DetectorModel{});
  PipelineConfig cfg;
  cfg.dedup_iou = 0.0;
  CHECK_THROWS_AS(Pipeline(compute_grid({960, 544, 352}), cfg, det), std::invalid_argument);
}
