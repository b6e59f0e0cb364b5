#include "stp/metrics.hpp"

#include <algorithm>
#include <tuple>

namespace stp {

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
  true_positives += other.true_positives;
  false_negatives += other.false_negatives;
  false_positives += other.false_positives;
  return *this;
}

namespace {

auto box_key(const Box& b) { return std::tie(b.x, b.y, b.w, b.h, b.confidence, b.class_id); }

}  // namespace

EvalCounts match_detections(std::span<const Box> gt, std::span<const Box> pred,
                            double iou_threshold) {
  std::vector<MatchedPair> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double v = iou(gt[g], pred[p]);
      if (v > 0.0 && v >= iou_threshold) candidates.push_back({g, p, v});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const MatchedPair& a, const MatchedPair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.gt != b.gt) return a.gt < b.gt;
    if (box_key(pred[a.pred]) != box_key(pred[b.pred])) {
      return box_key(pred[a.pred]) < box_key(pred[b.pred]);
    }
    return a.pred < b.pred;
  });

  EvalCounts out;
  std::vector<bool> gt_used(gt.size(), false);
  std::vector<bool> pred_used(pred.size(), false);
  for (const MatchedPair& c : candidates) {
    if (gt_used[c.gt] || pred_used[c.pred]) continue;
    gt_used[c.gt] = true;
    pred_used[c.pred] = true;
    out.matches.push_back(c);
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.gt < b.gt; });

  out.true_positives = static_cast<long long>(out.matches.size());
  out.false_negatives = static_cast<long long>(gt.size()) - out.true_positives;
  out.false_positives = static_cast<long long>(pred.size()) - out.true_positives;
  return out;
}

std::optional<double> sensitivity(const EvalCounts& counts) {
  const long long total = counts.ground_truth();
  if (total <= 0) return std::nullopt;
  return static_cast<double>(counts.true_positives) / static_cast<double>(total);
}

std::optional<double> apt(std::span<const double> times) {
  if (times.empty()) return std::nullopt;
  double sum = 0.0;
  for (double t : times) sum += t;
  return sum / static_cast<double>(times.size());
}

std::optional<double> apt(const TimingRecord& record) { return apt(std::span<const double>(record.times)); }

}  // namespace stp
