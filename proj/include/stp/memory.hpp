#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stp/geometry.hpp"

namespace stp {

struct MemoryConfig {
  int buffer_len = 3;               // history window, in frames
  double match_iou_threshold = 0.5;
  int evict_after = 3;              // processed frames without a re-detection
  double confidence_floor = 0.5;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// A remembered detection. `seen_tick` is the owning tile's processing
/// counter at the last re-detection; eviction is measured against it.
struct TrackedBox {
  std::uint64_t id = 0;
  Box box;
  int detection_count = 1;
  std::size_t last_tile = 0;
  int class_id = 0;
  long long last_seen_frame = 0;
  long long seen_tick = 0;
  std::vector<Box> history;  // latest positions, oldest first, at most buffer_len
};

struct MatchReport {
  int updated = 0;
  int created = 0;
  std::vector<double> match_ious;  // one entry per updated track

  double iou_sum() const;
};

/// Per-tile store of remembered boxes.
///
/// Boxes are only compared against tracks of the tile they were detected in.
/// A tile's eviction clock advances once per ingest into that tile, so tracks
/// in tiles that are not being processed are retained indefinitely.
class TrackStore {
 public:
  explicit TrackStore(std::size_t tile_count);

  std::size_t tile_count() const { return tiles_.size(); }
  long long current_frame() const { return current_frame_; }

  /// Matches `detections` against the tile's tracks (greedy, highest IoU
  /// first, each track matched at most once) and records the tile as
  /// processed at `frame`. Detections are expected to be filtered to
  /// `cfg.confidence_floor` already; boxes below it are ignored.
  /// Throws std::out_of_range for an unknown tile.
  MatchReport ingest(std::size_t tile, std::span<const Box> detections,
                     long long frame, const MemoryConfig& cfg);

  /// Removes tracks whose tile has been processed more than
  /// `cfg.evict_after` times since the track was last seen. Returns the
  /// number removed.
  int evict_stale(long long frame, const MemoryConfig& cfg);

  /// Current positions of the tile's tracks, in creation order.
  std::vector<Box> remembered(std::size_t tile) const;

  const std::vector<TrackedBox>& tracks(std::size_t tile) const;

  /// Number of times the tile has been processed.
  long long processed_ticks(std::size_t tile) const;

  std::size_t live_count(std::size_t tile) const;
  std::size_t total_live() const;
  long long total_detection_count() const;

  void clear();

 private:
  struct TileSlot {
    std::vector<TrackedBox> tracks;
    long long ticks = 0;
  };

  const TileSlot& slot(std::size_t tile) const;
  TileSlot& slot(std::size_t tile);

  std::vector<TileSlot> tiles_;
  long long current_frame_ = 0;
  std::uint64_t next_id_ = 1;
};

}  // namespace stp
