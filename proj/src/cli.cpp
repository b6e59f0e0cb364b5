#include "stp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "stp/analysis.hpp"
#include "stp/report.hpp"
#include "stp/scenario.hpp"

namespace stp::cli {
namespace {

namespace fs = std::filesystem;

/// Flag values shared by `run` and `sweep`, before conversion to RunSettings.
struct RunFlags {
  std::string scenario;
  std::string strategy = "ta";
  int cnn_size = 352;
  int reset_time = 10;
  std::optional<int> budget_n;
  std::optional<double> target_apt;
  double per_tile_cost = 0.025;
  double miss_rate = 0.0;
  double noise = 0.0;
  double confidence_lo = 0.6;
  double confidence_hi = 1.0;
  std::uint64_t seed = 0;
  double overhead = 0.0;
  int evict_after = 3;
  double match_iou = 0.5;
  double confidence_floor = 0.5;
  double dedup_iou = 0.5;
  double eval_iou = 0.5;
  bool no_memory = false;
  bool resize_baseline = false;
  double resize_exponent = 1.0;
  bool wall_clock = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_strategy) {
  cmd->add_option("scenario", f.scenario, "Scenario file")->required();
  if (with_strategy) {
    cmd->add_option("--strategy", f.strategy, "Tile selection: ta, t1, to or tsm");
    cmd->add_option("--cnn-size", f.cnn_size, "Network input side in pixels");
  }
  cmd->add_option("--reset-time", f.reset_time, "TO: frames before an unsearched tile is forced");
  cmd->add_option("--budget-n", f.budget_n, "TSM: tiles per frame");
  cmd->add_option("--target-apt", f.target_apt, "TSM: target seconds per frame");
  cmd->add_option("--per-tile-cost", f.per_tile_cost, "Seconds per processed tile");
  cmd->add_option("--miss-rate", f.miss_rate, "Synthetic detector miss probability");
  cmd->add_option("--noise", f.noise, "Synthetic detector corner jitter in pixels");
  cmd->add_option("--confidence-lo", f.confidence_lo, "Lowest synthetic confidence");
  cmd->add_option("--confidence-hi", f.confidence_hi, "Highest synthetic confidence");
  cmd->add_option("--seed", f.seed, "Detector seed");
  cmd->add_option("--overhead", f.overhead, "Fixed seconds added per frame");
  cmd->add_option("--evict-after", f.evict_after, "Processed frames before a lost box is dropped");
  cmd->add_option("--match-iou", f.match_iou, "Memory association IoU threshold");
  cmd->add_option("--confidence-floor", f.confidence_floor, "Minimum confidence kept in memory");
  cmd->add_option("--dedup-iou", f.dedup_iou, "Cross-tile duplicate IoU threshold");
  cmd->add_option("--eval-iou", f.eval_iou, "Ground-truth matching IoU threshold");
  cmd->add_flag("--no-memory", f.no_memory, "Report only the current frame's detections");
  cmd->add_flag("--resize-baseline", f.resize_baseline,
                "Emulate a resized full frame: one tile, resolution-scaled miss rate");
  cmd->add_option("--resize-exponent", f.resize_exponent, "Miss-rate scaling exponent");
  cmd->add_flag("--wall-clock", f.wall_clock, "Record wall-clock time per frame");
}

RunSettings to_settings(const RunFlags& f, StrategyKind kind, int cnn_size) {
  RunSettings s;
  s.cnn_size = cnn_size;
  s.resize_baseline = f.resize_baseline;
  s.resize_exponent = f.resize_exponent;
  s.pipeline.strategy.kind = kind;
  s.pipeline.strategy.reset_time = f.reset_time;
  s.pipeline.strategy.budget_n = f.budget_n;
  s.pipeline.strategy.target_apt = f.target_apt;
  s.pipeline.strategy.per_tile_cost = f.per_tile_cost;
  s.pipeline.memory.evict_after = f.evict_after;
  s.pipeline.memory.match_iou_threshold = f.match_iou;
  s.pipeline.memory.confidence_floor = f.confidence_floor;
  s.pipeline.memory_enabled = !f.no_memory;
  s.pipeline.frame_overhead = f.overhead;
  s.pipeline.dedup_iou = f.dedup_iou;
  s.pipeline.eval_iou = f.eval_iou;
  s.pipeline.record_wall_clock = f.wall_clock;
  s.detector.miss_rate = f.miss_rate;
  s.detector.position_noise = f.noise;
  s.detector.confidence_lo = f.confidence_lo;
  s.detector.confidence_hi = f.confidence_hi;
  s.detector.per_tile_latency = f.per_tile_cost;
  s.detector.rng_seed = f.seed;
  s.validate();
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string cell_name(StrategyKind kind, int size) {
  return "sweep cell " + std::string(to_string(kind)) + "@" + std::to_string(size);
}

int cmd_run(const RunFlags& f, const std::string& out_path, std::ostream& out) {
  const RunSettings settings = to_settings(f, parse_strategy(f.strategy), f.cnn_size);
  const Scenario scenario = load_scenario(f.scenario);
  const Report report = execute(scenario, settings);
  if (!out_path.empty()) save_report(report, out_path);
  print_summary(out, report);
  return kOk;
}

int cmd_sweep(const RunFlags& f, const std::string& strategies, const std::string& sizes,
              const std::string& out_dir, std::ostream& out) {
  std::vector<StrategyKind> kinds;
  for (const std::string& s : split_list(strategies)) kinds.push_back(parse_strategy(s));
  std::vector<int> cnn_sizes;
  for (const std::string& s : split_list(sizes)) {
    try {
      cnn_sizes.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad cnn size '" + s + "'");
    }
  }
  if (kinds.empty() || cnn_sizes.empty()) throw std::invalid_argument("empty sweep axis");

  const Scenario scenario = load_scenario(f.scenario);
  if (!out_dir.empty()) fs::create_directories(out_dir);

  std::ostringstream table;
  table << "strategy\tcnn_size\ttiles\tsen\tapt\tmean_selected\tfp\n";
  for (int size : cnn_sizes) {
    for (StrategyKind kind : kinds) {
      Report report;
      try {
        report = execute(scenario, to_settings(f, kind, size));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(cell_name(kind, size) + ": " + e.what());
      } catch (const ScenarioError&) {
        throw;
      } catch (const std::exception& e) {
        throw std::runtime_error(cell_name(kind, size) + ": " + e.what());
      }
      if (!out_dir.empty()) {
        save_report(report, fs::path(out_dir) /
                                (std::string(to_string(kind)) + "_" + std::to_string(size) + ".report"));
      }
      const RunSummary& s = report.summary;
      table << to_string(kind) << '\t' << size << '\t' << s.tiles << '\t'
            << (s.sen ? std::to_string(*s.sen) : "n/a") << '\t'
            << (s.apt ? std::to_string(*s.apt) : "n/a") << '\t' << std::to_string(s.mean_selected)
            << '\t' << s.false_positives << '\n';
    }
  }
  if (!out_dir.empty()) {
    std::ofstream tsv(fs::path(out_dir) / "sweep.tsv", std::ios::binary | std::ios::trunc);
    tsv << table.str();
  }
  out << table.str();
  return kOk;
}

int cmd_telemetry(const std::string& report_path, const std::string& out_path, std::ostream& out) {
  const Report report = load_report(report_path);
  if (out_path.empty()) {
    write_tile_telemetry(out, report);
  } else {
    std::ofstream csv(out_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw ReportError("cannot write " + out_path);
    write_tile_telemetry(csv, report);
  }
  return kOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out_path,
                std::ostream& out) {
  std::vector<Report> reports;
  for (const std::string& p : paths) reports.push_back(load_report(p));
  const auto rows = compare(reports, 0);
  write_tradeoff_table(out, rows);
  if (!out_path.empty()) {
    std::ofstream tsv(out_path, std::ios::binary | std::ios::trunc);
    if (!tsv) throw ReportError("cannot write " + out_path);
    write_tradeoff_table(tsv, rows);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selective tile processing simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run one configuration on a scenario");
  add_run_flags(run_cmd, run_flags, true);
  run_cmd->add_option("--out", run_out, "Report file to write");

  RunFlags sweep_flags;
  std::string sweep_strategies = "ta,t1,to,tsm";
  std::string sweep_sizes = "544,352,256";
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every strategy x cnn size combination");
  add_run_flags(sweep_cmd, sweep_flags, false);
  sweep_cmd->add_option("--strategies", sweep_strategies, "Comma-separated strategies");
  sweep_cmd->add_option("--cnn-sizes", sweep_sizes, "Comma-separated network input sides");
  sweep_cmd->add_option("--out-dir", sweep_out, "Directory for per-cell reports and sweep.tsv");

  std::string tele_report;
  std::string tele_out;
  auto* tele_cmd = app.add_subcommand("telemetry", "Export per-tile time series from a report");
  tele_cmd->add_option("report", tele_report, "Report file")->required();
  tele_cmd->add_option("--out", tele_out, "CSV file (default: stdout)");

  std::vector<std::string> cmp_reports;
  std::string cmp_out;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare reports against the first (baseline)");
  cmp_cmd->add_option("reports", cmp_reports, "Baseline report followed by others")->required();
  cmp_cmd->add_option("--out", cmp_out, "Table file to write");

  GeneratorParams gen;
  std::string gen_motion = "linear";
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic scenario");
  gen_cmd->add_option("--out", gen_out, "Scenario file")->required();
  gen_cmd->add_option("--name", gen.name);
  gen_cmd->add_option("--width", gen.frame_w);
  gen_cmd->add_option("--height", gen.frame_h);
  gen_cmd->add_option("--frames", gen.frames);
  gen_cmd->add_option("--objects", gen.objects);
  gen_cmd->add_option("--motion", gen_motion, "static or linear");
  gen_cmd->add_option("--min-speed", gen.min_speed, "px/frame");
  gen_cmd->add_option("--max-speed", gen.max_speed, "px/frame");
  gen_cmd->add_flag("--enter-exit", gen.enter_exit, "Objects appear and leave mid-sequence");
  gen_cmd->add_option("--min-lifetime", gen.min_lifetime);
  gen_cmd->add_option("--seed", gen.seed);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream cli_out;
    std::ostringstream cli_err;
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, run_out, out);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_strategies, sweep_sizes, sweep_out, out);
    if (*tele_cmd) return cmd_telemetry(tele_report, tele_out, out);
    if (*cmp_cmd) return cmd_compare(cmp_reports, cmp_out, out);
    if (*gen_cmd) {
      if (gen_motion == "static") {
        gen.motion = MotionModel::Static;
      } else if (gen_motion == "linear") {
        gen.motion = MotionModel::Linear;
      } else {
        throw std::invalid_argument("unknown motion model '" + gen_motion + "'");
      }
      save_scenario(generate_scenario(gen), gen_out);
      out << "wrote " << gen_out << "\n";
      return kOk;
    }
  } catch (const ScenarioError& e) {
    err << "error: scenario " << to_string(e.code()) << ": " << e.what() << "\n";
    return kDataError;
  } catch (const ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace stp::cli
