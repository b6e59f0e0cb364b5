#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stp/detector.hpp"
#include "stp/report.hpp"

namespace stp {

/// Downscale factor when a frame is resized to fit a square network input:
/// max(frame_w, frame_h) / cnn_size, at least 1.
double downscale_factor(int frame_w, int frame_h, int cnn_size);

/// Miss rate of a detector that sees objects shrunk by `downscale`:
/// 1 - (1 - base) * downscale^-exponent. Synthetic; stands in for the loss of
/// small objects when a frame is resized instead of tiled.
double resized_miss_rate(double base_miss_rate, double downscale, double exponent);

struct TradeoffRow {
  std::string label;
  std::size_t tiles = 0;
  std::optional<double> sen;
  std::optional<double> apt;
  std::optional<double> delta_sen;  // sen - baseline sen
  std::optional<double> apt_ratio;  // apt / baseline apt
};

/// Sensitivity difference and APT ratio of every report against
/// `reports[baseline]`. Throws ReportError when the reports were produced
/// from different scenarios or fewer than two are given.
std::vector<TradeoffRow> compare(std::span<const Report> reports, std::size_t baseline = 0);

/// Tab-separated table with a header row.
void write_tradeoff_table(std::ostream& os, std::span<const TradeoffRow> rows);

}  // namespace stp
