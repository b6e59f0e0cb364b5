#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stp/detector.hpp"
#include "stp/geometry.hpp"
#include "stp/pipeline.hpp"
#include "stp/scenario.hpp"

namespace stp {

inline constexpr int kReportSchemaVersion = 1;

/// Everything needed to reproduce one run on a scenario.
struct RunSettings {
  int cnn_size = 352;
  PipelineConfig pipeline;
  DetectorModel detector;
  bool resize_baseline = false;   // one whole-frame tile with a resolution-scaled miss rate
  double resize_exponent = 1.0;

  void validate() const;
};

/// Grid for `settings` on a frame of the given size.
TileGrid build_grid(const RunSettings& settings, int frame_w, int frame_h);

/// Detector parameters actually used by the run (the miss rate is scaled up
/// for the resize baseline).
DetectorModel effective_model(const RunSettings& settings, int frame_w, int frame_h);

struct Report {
  std::string scenario_name;
  std::uint64_t scenario_fingerprint = 0;
  int frame_w = 0;
  int frame_h = 0;
  RunSettings settings;
  TileGrid grid;
  std::vector<FrameResult> frames;
  RunSummary summary;

  /// Short label such as "tsm@352" or "resize@352".
  std::string label() const;
};

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `scenario` under `settings` with the synthetic detector.
Report execute(const Scenario& scenario, const RunSettings& settings);

/// Header line, one line per frame, then a summary line.
std::string to_text(const Report& report);
Report report_from_text(std::string_view text);

void save_report(const Report& report, const std::filesystem::path& path);
Report load_report(const std::filesystem::path& path);

/// Human-readable summary block.
void print_summary(std::ostream& os, const Report& report);

/// Per-tile time series as CSV:
/// frame,tile,selected,objects,gt,cumulative_selected
void write_tile_telemetry(std::ostream& os, const Report& report);

struct TileTotals {
  std::vector<long long> selections;  // times each tile was processed
  std::vector<long long> objects;     // remembered objects summed over frames
};

TileTotals tile_totals(const Report& report);

}  // namespace stp
