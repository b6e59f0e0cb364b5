#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stp/geometry.hpp"
#include "stp/memory.hpp"

namespace stp {

/// Per-tile selection criteria.
struct TileStats {
  int objects = 0;                 // live tracks in the tile
  double cum_iou = 0.0;            // summed match IoU at the last processing(s)
  int not_selected = 0;            // consecutive frames the tile was skipped
  int frames_since_detection = 0;  // frames since the tile last produced a detection

  friend bool operator==(const TileStats&, const TileStats&) = default;
};

enum class StrategyKind { TA, T1, TO, TSM };

std::string_view to_string(StrategyKind kind);
/// Accepts "ta", "t1", "to", "tsm" (case-insensitive). Throws
/// std::invalid_argument otherwise.
StrategyKind parse_strategy(std::string_view name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::TA;
  int reset_time = 10;                // TO: max frames a tile may go unsearched
  std::optional<int> budget_n;        // TSM: explicit tile budget
  std::optional<double> target_apt;   // TSM: seconds per frame
  double per_tile_cost = 0.0;         // TSM: seconds per processed tile
  int iou_window = 1;                 // TSM: processings summed into cum_iou

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Tile budget for TSM on a grid of `tile_count` tiles. An explicit budget_n
/// wins; otherwise floor(target_apt / per_tile_cost); otherwise 1. The result
/// is clamped to [1, tile_count].
std::size_t resolve_budget(const StrategyConfig& cfg, std::size_t tile_count);

/// Mutable selection state carried across the frames of one run.
struct SelectionState {
  explicit SelectionState(std::size_t tile_count);

  std::size_t tile_count() const { return stats.size(); }

  long long frame = 0;               // frame currently being selected for
  std::size_t round_robin_cursor = 0;
  std::vector<TileStats> stats;
  std::vector<long long> last_processed;  // -1 when never processed
  std::vector<std::deque<double>> iou_history;
  long long frames_since_full_sweep = 0;
};

std::vector<std::size_t> select_ta(const SelectionState& state, const TileGrid& grid);

/// Returns the cursor tile and advances the cursor modulo the tile count.
std::size_t select_t1(SelectionState& state, const TileGrid& grid);

/// All tiles on the first frame. Afterwards tiles with remembered objects,
/// plus every tile that has gone `reset_time` frames without being searched.
std::vector<std::size_t> select_to(SelectionState& state, const TileGrid& grid,
                                   const StrategyConfig& cfg);

struct CriteriaMaxima {
  int objects = 0;
  double cum_iou = 0.0;
  int not_selected = 0;
  int frames_since_detection = 0;
};

CriteriaMaxima criteria_maxima(std::span<const TileStats> stats);

/// Tile value: each criterion divided by its maximum over all tiles, with
/// the IoU term inverted. A ratio whose maximum is zero counts as 0, so the
/// score lies in [0, 4].
double tile_value(const TileStats& stats, const CriteriaMaxima& maxima);

std::vector<double> tile_values(std::span<const TileStats> stats);

/// The `resolve_budget` highest-valued tiles, ties broken by lower index,
/// returned in ascending index order. Scores within 1e-9 of each other tie. Does not modify the counters; those are
/// advanced by update_stats.
std::vector<std::size_t> select_tsm(const SelectionState& state, const TileGrid& grid,
                                    const StrategyConfig& cfg);

/// Dispatches on `cfg.kind`. Result is sorted ascending and duplicate-free.
std::vector<std::size_t> select_tiles(SelectionState& state, const TileGrid& grid,
                                      const StrategyConfig& cfg);

/// Outcome of a frame for one tile, as seen by the statistics update.
struct TileOutcome {
  bool selected = false;
  int detections = 0;          // detections retained after the confidence floor
  MatchReport match;           // ingest result; empty when not selected
  int live_tracks = 0;         // tracks remembered in the tile after ingest
};

/// Advances one tile's statistics for the current frame. Must be called
/// once per tile per frame.
const TileStats& update_stats(SelectionState& state, std::size_t tile,
                              const TileOutcome& outcome, const StrategyConfig& cfg);

}  // namespace stp
