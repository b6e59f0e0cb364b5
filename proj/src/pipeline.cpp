#include "stp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stp {

void PipelineConfig::validate() const {
  strategy.validate();
  memory.validate();
  if (!(frame_overhead >= 0.0)) throw std::invalid_argument("frame_overhead must be >= 0");
  if (!(dedup_iou > 0.0 && dedup_iou <= 1.0)) throw std::invalid_argument("dedup_iou must lie in (0, 1]");
  if (!(eval_iou > 0.0 && eval_iou <= 1.0)) throw std::invalid_argument("eval_iou must lie in (0, 1]");
}

std::vector<OutputBox> dedup_boxes(std::span<const OutputBox> boxes, double iou_threshold) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (boxes[a].box.confidence != boxes[b].box.confidence) {
      return boxes[a].box.confidence > boxes[b].box.confidence;
    }
    return boxes[a].tile < boxes[b].tile;
  });
  std::vector<OutputBox> kept;
  for (std::size_t i : order) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const OutputBox& k) {
      return iou(k.box, boxes[i].box) >= iou_threshold;
    });
    if (!duplicate) kept.push_back(boxes[i]);
  }
  return kept;
}

Pipeline::Pipeline(TileGrid grid, PipelineConfig config, Detector& detector)
    : grid_(std::move(grid)),
      config_(std::move(config)),
      detector_(&detector),
      store_(grid_.size()),
      state_(grid_.size()) {
  if (grid_.size() == 0) throw std::invalid_argument("grid has no tiles");
  config_.validate();
}

void Pipeline::reset() {
  store_ = TrackStore(grid_.size());
  state_ = SelectionState(grid_.size());
}

FrameResult Pipeline::run_frame(const ScenarioFrame& frame, int frame_w, int frame_h) {
  if (frame_w != grid_.frame_w || frame_h != grid_.frame_h) {
    throw std::invalid_argument("frame " + std::to_string(frame.index) + " is " +
                                std::to_string(frame_w) + "x" + std::to_string(frame_h) +
                                " but the grid expects " + std::to_string(grid_.frame_w) + "x" +
                                std::to_string(grid_.frame_h));
  }
  using Clock = std::chrono::steady_clock;
  const auto wall_start = config_.record_wall_clock ? Clock::now() : Clock::time_point{};

  FrameResult out;
  out.frame = frame.index;
  state_.frame = frame.index;
  out.selection_stats = state_.stats;
  out.selected_tiles = select_tiles(state_, grid_, config_.strategy);

  const std::size_t n_tiles = grid_.size();
  std::vector<TileOutcome> outcomes(n_tiles);
  std::vector<OutputBox> fresh;  // used when memory is disabled
  const FrameView view{frame.index, frame.gt};
  double elapsed = 0.0;

  for (std::size_t t : out.selected_tiles) {
    DetectResult res = detector_->detect(view, TileRef{t, grid_[t]});
    out.detector_calls += 1;
    elapsed += res.elapsed;

    std::vector<Box> kept;
    for (const Detection& d : res.detections) {
      if (d.box.confidence >= config_.memory.confidence_floor) kept.push_back(d.box);
    }
    TileOutcome& oc = outcomes[t];
    oc.selected = true;
    oc.detections = static_cast<int>(kept.size());
    if (config_.memory_enabled) {
      oc.match = store_.ingest(t, kept, frame.index, config_.memory);
    } else {
      for (const Box& b : kept) fresh.push_back(OutputBox{b, t});
    }
  }
  if (config_.memory_enabled) store_.evict_stale(frame.index, config_.memory);

  out.tile_objects.assign(n_tiles, 0);
  std::vector<OutputBox> candidates;
  if (config_.memory_enabled) {
    for (std::size_t t = 0; t < n_tiles; ++t) {
      const auto boxes = store_.remembered(t);
      out.tile_objects[t] = static_cast<int>(boxes.size());
      for (const Box& b : boxes) candidates.push_back(OutputBox{b, t});
    }
  } else {
    for (const OutputBox& b : fresh) out.tile_objects[b.tile] += 1;
    candidates = std::move(fresh);
  }

  for (std::size_t t = 0; t < n_tiles; ++t) {
    outcomes[t].live_tracks = out.tile_objects[t];
    update_stats(state_, t, outcomes[t], config_.strategy);
  }

  out.detections = dedup_boxes(candidates, config_.dedup_iou);
  out.processing_time = elapsed + config_.frame_overhead;

  out.tile_gt.assign(n_tiles, 0);
  std::vector<Box> gt_boxes;
  gt_boxes.reserve(frame.gt.size());
  for (const GtObject& o : frame.gt) {
    gt_boxes.push_back(o.box);
    out.tile_gt[tile_index_of(grid_, o.box)] += 1;
  }
  std::vector<Box> pred;
  pred.reserve(out.detections.size());
  for (const OutputBox& b : out.detections) pred.push_back(b.box);
  out.eval = match_detections(gt_boxes, pred, config_.eval_iou);

  if (config_.record_wall_clock) {
    out.wall_time = std::chrono::duration<double>(Clock::now() - wall_start).count();
  }
  return out;
}

RunSummary summarize(std::span<const FrameResult> frames, std::size_t tile_count) {
  RunSummary s;
  s.frames = frames.size();
  s.tiles = tile_count;
  s.selection_counts.assign(tile_count, 0);
  std::vector<double> times;
  times.reserve(frames.size());
  long long selected = 0;
  EvalCounts pooled;
  for (const FrameResult& f : frames) {
    pooled += f.eval;
    times.push_back(f.processing_time);
    selected += static_cast<long long>(f.selected_tiles.size());
    s.detector_calls += f.detector_calls;
    for (std::size_t t : f.selected_tiles) {
      if (t < tile_count) s.selection_counts[t] += 1;
    }
  }
  s.true_positives = pooled.true_positives;
  s.false_negatives = pooled.false_negatives;
  s.false_positives = pooled.false_positives;
  s.sen = sensitivity(pooled);
  s.apt = apt(times);
  s.mean_selected = frames.empty() ? 0.0 : double(selected) / double(frames.size());
  return s;
}

ScenarioRun run_scenario(const Scenario& scenario, const TileGrid& grid,
                         const PipelineConfig& config, Detector& detector) {
  validate(scenario);
  Pipeline pipeline(grid, config, detector);
  ScenarioRun run;
  run.frames.reserve(scenario.frames.size());
  for (const ScenarioFrame& f : scenario.frames) {
    run.frames.push_back(pipeline.run_frame(f, scenario.frame_w, scenario.frame_h));
  }
  run.summary = summarize(run.frames, grid.size());
  return run;
}

}  // namespace stp
