#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stp/geometry.hpp"

namespace stp {

/// Ground-truth object: a box plus an id that is stable across frames.
struct GtObject {
  long long id = 0;
  Box box;

  friend bool operator==(const GtObject&, const GtObject&) = default;
};

struct Detection {
  Box box;
  std::size_t source_tile = 0;
};

/// What a detector may look at for one frame. Image-based backends would
/// carry pixel data here; the oracle only reads the ground truth.
struct FrameView {
  long long frame = 0;
  std::span<const GtObject> gt;
};

struct TileRef {
  std::size_t index = 0;
  Box rect;
};

struct DetectResult {
  std::vector<Detection> detections;
  double elapsed = 0.0;  // seconds
};

/// Extension point for real network backends.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectResult detect(const FrameView& frame, const TileRef& tile) = 0;
};

/// Parameters of the synthetic detector.
struct DetectorModel {
  double miss_rate = 0.0;        // per object per processed tile
  double position_noise = 0.0;   // max corner displacement, pixels
  double confidence_lo = 0.6;
  double confidence_hi = 1.0;
  double per_tile_latency = 0.025;  // seconds
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Synthetic detector: reports every ground-truth box whose center lies in
/// the tile, dropping each with probability `miss_rate`, jittering corners
/// uniformly by up to `position_noise` and clipping to the tile. Each draw is
/// keyed on (seed, frame, tile, object), so the output never depends on call
/// order.
DetectResult detect(const DetectorModel& model, const FrameView& frame, const TileRef& tile);

class OracleDetector final : public Detector {
 public:
  explicit OracleDetector(DetectorModel model);

  DetectResult detect(const FrameView& frame, const TileRef& tile) override;

  const DetectorModel& model() const { return model_; }
  std::uint64_t invocations() const { return invocations_; }

 private:
  DetectorModel model_;
  std::uint64_t invocations_ = 0;
};

}  // namespace stp
