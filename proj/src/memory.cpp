#include "stp/memory.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace stp {

void MemoryConfig::validate() const {
  if (buffer_len < 1) throw std::invalid_argument("buffer_len must be >= 1");
  if (evict_after < 1) throw std::invalid_argument("evict_after must be >= 1");
  if (!(match_iou_threshold > 0.0 && match_iou_threshold < 1.0)) {
    throw std::invalid_argument("match_iou_threshold must lie in (0, 1)");
  }
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) {
    throw std::invalid_argument("confidence_floor must lie in [0, 1]");
  }
}

double MatchReport::iou_sum() const {
  return std::accumulate(match_ious.begin(), match_ious.end(), 0.0);
}

TrackStore::TrackStore(std::size_t tile_count) : tiles_(tile_count) {}

const TrackStore::TileSlot& TrackStore::slot(std::size_t tile) const {
  if (tile >= tiles_.size()) {
    throw std::out_of_range("tile index " + std::to_string(tile) + " out of range (" +
                            std::to_string(tiles_.size()) + " tiles)");
  }
  return tiles_[tile];
}

TrackStore::TileSlot& TrackStore::slot(std::size_t tile) {
  return const_cast<TileSlot&>(std::as_const(*this).slot(tile));
}

MatchReport TrackStore::ingest(std::size_t tile, std::span<const Box> detections,
                               long long frame, const MemoryConfig& cfg) {
  TileSlot& s = slot(tile);
  s.ticks += 1;
  current_frame_ = std::max(current_frame_, frame);

  std::vector<std::size_t> kept;
  kept.reserve(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].confidence >= cfg.confidence_floor) kept.push_back(i);
  }

  struct Candidate {
    double iou;
    std::size_t det;
    std::size_t track;
  };
  std::vector<Candidate> candidates;
  for (std::size_t d : kept) {
    for (std::size_t t = 0; t < s.tracks.size(); ++t) {
      const double v = iou(detections[d], s.tracks[t].box);
      if (v >= cfg.match_iou_threshold) candidates.push_back({v, d, t});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.det != b.det) return a.det < b.det;
    return a.track < b.track;
  });

  MatchReport report;
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> track_used(s.tracks.size(), false);
  for (const Candidate& c : candidates) {
    if (det_used[c.det] || track_used[c.track]) continue;
    det_used[c.det] = true;
    track_used[c.track] = true;
    TrackedBox& tb = s.tracks[c.track];
    tb.box = detections[c.det];
    tb.class_id = detections[c.det].class_id;
    tb.detection_count += 1;
    tb.last_seen_frame = frame;
    tb.seen_tick = s.ticks;
    tb.last_tile = tile;
    tb.history.push_back(tb.box);
    if (tb.history.size() > static_cast<std::size_t>(cfg.buffer_len)) {
      tb.history.erase(tb.history.begin());
    }
    report.updated += 1;
    report.match_ious.push_back(c.iou);
  }

  for (std::size_t d : kept) {
    if (det_used[d]) continue;
    TrackedBox tb;
    tb.id = next_id_++;
    tb.box = detections[d];
    tb.class_id = detections[d].class_id;
    tb.detection_count = 1;
    tb.last_tile = tile;
    tb.last_seen_frame = frame;
    tb.seen_tick = s.ticks;
    tb.history.push_back(tb.box);
    s.tracks.push_back(std::move(tb));
    report.created += 1;
  }
  return report;
}

int TrackStore::evict_stale(long long frame, const MemoryConfig& cfg) {
  current_frame_ = std::max(current_frame_, frame);
  int evicted = 0;
  for (TileSlot& s : tiles_) {
    const auto before = s.tracks.size();
    std::erase_if(s.tracks, [&](const TrackedBox& tb) {
      return s.ticks - tb.seen_tick > cfg.evict_after;
    });
    evicted += static_cast<int>(before - s.tracks.size());
  }
  return evicted;
}

std::vector<Box> TrackStore::remembered(std::size_t tile) const {
  const TileSlot& s = slot(tile);
  std::vector<Box> out;
  out.reserve(s.tracks.size());
  for (const TrackedBox& tb : s.tracks) out.push_back(tb.box);
  return out;
}

const std::vector<TrackedBox>& TrackStore::tracks(std::size_t tile) const {
  return slot(tile).tracks;
}

long long TrackStore::processed_ticks(std::size_t tile) const { return slot(tile).ticks; }

std::size_t TrackStore::live_count(std::size_t tile) const { return slot(tile).tracks.size(); }

std::size_t TrackStore::total_live() const {
  std::size_t n = 0;
  for (const TileSlot& s : tiles_) n += s.tracks.size();
  return n;
}

long long TrackStore::total_detection_count() const {
  long long n = 0;
  for (const TileSlot& s : tiles_) {
    for (const TrackedBox& tb : s.tracks) n += tb.detection_count;
  }
  return n;
}

void TrackStore::clear() {
  for (TileSlot& s : tiles_) {
    s.tracks.clear();
    s.ticks = 0;
  }
  current_frame_ = 0;
  next_id_ = 1;
}

}  // namespace stp
