#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stp/geometry.hpp"

namespace stp {

struct MatchedPair {
  std::size_t gt = 0;
  std::size_t pred = 0;
  double iou = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct EvalCounts {
  long long true_positives = 0;
  long long false_negatives = 0;
  long long false_positives = 0;
  std::vector<MatchedPair> matches;  // sorted by gt index

  long long ground_truth() const { return true_positives + false_negatives; }

  /// Pools counts; matched pairs are not carried over.
  EvalCounts& operator+=(const EvalCounts& other);
};

/// One-to-one matching of predictions to ground truth. Candidate pairs with
/// IoU >= `iou_threshold` are taken greedily in descending IoU order; ties go
/// to the lower gt index, then to the lexicographically smaller prediction
/// box, so the result does not depend on prediction order.
EvalCounts match_detections(std::span<const Box> gt, std::span<const Box> pred,
                            double iou_threshold = 0.5);

/// TP / (TP + FN); empty when there is no ground truth.
std::optional<double> sensitivity(const EvalCounts& counts);

struct TimingRecord {
  std::vector<double> times;  // seconds per frame
};

/// Mean per-frame processing time; empty for an empty record.
std::optional<double> apt(const TimingRecord& record);
std::optional<double> apt(std::span<const double> times);

}  // namespace stp
