#include "stp/detector.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "stp/rng.hpp"

namespace stp {

void DetectorModel::validate() const {
  if (!(miss_rate >= 0.0 && miss_rate <= 1.0)) {
    throw std::invalid_argument("miss_rate must lie in [0, 1]");
  }
  if (!(position_noise >= 0.0)) throw std::invalid_argument("position_noise must be >= 0");
  if (!(confidence_lo >= 0.0 && confidence_lo <= confidence_hi && confidence_hi <= 1.0)) {
    throw std::invalid_argument("confidence range must satisfy 0 <= lo <= hi <= 1");
  }
  if (!(per_tile_latency >= 0.0)) throw std::invalid_argument("per_tile_latency must be >= 0");
}

namespace {

enum Draw : std::uint64_t { kMiss = 0, kConfidence, kX0, kY0, kX1, kY1 };

constexpr double kMinExtent = 1.0;

}  // namespace

DetectResult detect(const DetectorModel& model, const FrameView& frame, const TileRef& tile) {
  DetectResult out;
  out.elapsed = model.per_tile_latency;
  for (const GtObject& obj : frame.gt) {
    if (!center_inside(obj.box, tile.rect)) continue;
    auto draw = [&](Draw d) {
      return to_unit(hash_key({model.rng_seed, static_cast<std::uint64_t>(frame.frame),
                               static_cast<std::uint64_t>(tile.index),
                               static_cast<std::uint64_t>(obj.id), d}));
    };
    if (model.miss_rate > 0.0 && draw(kMiss) < model.miss_rate) continue;

    Box b = obj.box;
    b.confidence = model.confidence_lo + (model.confidence_hi - model.confidence_lo) * draw(kConfidence);
    if (model.position_noise > 0.0) {
      auto jitter = [&](Draw d) { return (2.0 * draw(d) - 1.0) * model.position_noise; };
      double x0 = b.x + jitter(kX0);
      double y0 = b.y + jitter(kY0);
      double x1 = b.right() + jitter(kX1);
      double y1 = b.bottom() + jitter(kY1);
      if (x1 - x0 < kMinExtent) x1 = x0 + kMinExtent;
      if (y1 - y0 < kMinExtent) y1 = y0 + kMinExtent;
      b.x = x0;
      b.y = y0;
      b.w = x1 - x0;
      b.h = y1 - y0;
    }
    b = clip_to(b, tile.rect);
    if (b.w <= 0.0 || b.h <= 0.0) continue;
    out.detections.push_back(Detection{b, tile.index});
  }
  return out;
}

OracleDetector::OracleDetector(DetectorModel model) : model_(std::move(model)) {
  model_.validate();
}

DetectResult OracleDetector::detect(const FrameView& frame, const TileRef& tile) {
  ++invocations_;
  return stp::detect(model_, frame, tile);
}

}  // namespace stp
