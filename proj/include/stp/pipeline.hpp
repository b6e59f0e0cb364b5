#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stp/attention.hpp"
#include "stp/detector.hpp"
#include "stp/geometry.hpp"
#include "stp/memory.hpp"
#include "stp/metrics.hpp"
#include "stp/scenario.hpp"

namespace stp {

struct PipelineConfig {
  StrategyConfig strategy;
  MemoryConfig memory;
  double frame_overhead = 0.0;  // seconds added to every frame
  double dedup_iou = 0.5;       // output boxes at or above this IoU are merged
  double eval_iou = 0.5;        // ground-truth matching threshold
  bool memory_enabled = true;   // false: report only this frame's detections
  bool record_wall_clock = false;

  void validate() const;
};

/// An output box and the tile whose memory (or detector call) produced it.
struct OutputBox {
  Box box;
  std::size_t tile = 0;
};

struct FrameResult {
  long long frame = 0;
  std::vector<std::size_t> selected_tiles;   // ascending
  std::vector<OutputBox> detections;         // fused output
  double processing_time = 0.0;              // simulated seconds
  double wall_time = 0.0;                    // 0 unless recorded
  std::vector<TileStats> selection_stats;    // statistics the selection saw
  std::vector<int> tile_objects;             // remembered boxes per tile after the frame
  std::vector<int> tile_gt;                  // ground-truth objects per tile (nearest center)
  EvalCounts eval;
  int detector_calls = 0;
};

/// Greedy merge: boxes in descending confidence order (ties: lower tile,
/// then input order) are kept unless they reach `iou_threshold` with an
/// already kept box.
std::vector<OutputBox> dedup_boxes(std::span<const OutputBox> boxes, double iou_threshold);

/// Per-frame orchestration over one run. Holds the memory store and
/// selection state, which persist across frames and are reset by `reset`.
class Pipeline {
 public:
  Pipeline(TileGrid grid, PipelineConfig config, Detector& detector);

  /// Processes the next frame. Throws std::invalid_argument when the frame
  /// size does not match the grid.
  FrameResult run_frame(const ScenarioFrame& frame, int frame_w, int frame_h);

  void reset();

  const TileGrid& grid() const { return grid_; }
  const PipelineConfig& config() const { return config_; }
  const TrackStore& store() const { return store_; }
  const SelectionState& selection() const { return state_; }

 private:
  TileGrid grid_;
  PipelineConfig config_;
  Detector* detector_;
  TrackStore store_;
  SelectionState state_;
};

struct RunSummary {
  std::size_t frames = 0;
  std::size_t tiles = 0;
  long long true_positives = 0;
  long long false_negatives = 0;
  long long false_positives = 0;
  std::optional<double> sen;
  std::optional<double> apt;
  double mean_selected = 0.0;
  long long detector_calls = 0;
  std::vector<long long> selection_counts;  // per tile

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

/// Pools frame results into a summary. Depends only on the records, so a
/// summary can always be recomputed from a report.
RunSummary summarize(std::span<const FrameResult> frames, std::size_t tile_count);

struct ScenarioRun {
  std::vector<FrameResult> frames;
  RunSummary summary;
};

/// Runs every frame of `scenario` through a fresh pipeline.
ScenarioRun run_scenario(const Scenario& scenario, const TileGrid& grid,
                         const PipelineConfig& config, Detector& detector);

}  // namespace stp
