#include "stp/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "stp/analysis.hpp"

namespace stp {

using nlohmann::json;

void RunSettings::validate() const {
  if (cnn_size <= 0) throw std::invalid_argument("cnn_size must be positive");
  if (!(resize_exponent >= 0.0)) throw std::invalid_argument("resize_exponent must be >= 0");
  pipeline.validate();
  detector.validate();
}

TileGrid build_grid(const RunSettings& settings, int frame_w, int frame_h) {
  if (settings.resize_baseline) return whole_frame_grid(frame_w, frame_h, settings.cnn_size);
  return compute_grid(GridConfig{frame_w, frame_h, settings.cnn_size});
}

DetectorModel effective_model(const RunSettings& settings, int frame_w, int frame_h) {
  DetectorModel m = settings.detector;
  if (settings.resize_baseline) {
    m.miss_rate = resized_miss_rate(m.miss_rate, downscale_factor(frame_w, frame_h, settings.cnn_size),
                                    settings.resize_exponent);
  }
  return m;
}

std::string Report::label() const {
  const std::string kind =
      settings.resize_baseline ? "resize" : std::string(to_string(settings.pipeline.strategy.kind));
  return kind + "@" + std::to_string(settings.cnn_size);
}

Report execute(const Scenario& scenario, const RunSettings& settings) {
  settings.validate();
  validate(scenario);
  Report r;
  r.scenario_name = scenario.meta.name;
  r.scenario_fingerprint = fingerprint(scenario);
  r.frame_w = scenario.frame_w;
  r.frame_h = scenario.frame_h;
  r.settings = settings;
  r.grid = build_grid(settings, scenario.frame_w, scenario.frame_h);

  OracleDetector detector(effective_model(settings, scenario.frame_w, scenario.frame_h));
  ScenarioRun run = run_scenario(scenario, r.grid, settings.pipeline, detector);
  r.frames = std::move(run.frames);
  r.summary = run.summary;
  return r;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json settings_json(const RunSettings& s) {
  const StrategyConfig& st = s.pipeline.strategy;
  const MemoryConfig& m = s.pipeline.memory;
  const DetectorModel& d = s.detector;
  return json{
      {"cnn_size", s.cnn_size},
      {"resize_baseline", s.resize_baseline},
      {"resize_exponent", s.resize_exponent},
      {"strategy",
       {{"kind", std::string(to_string(st.kind))},
        {"reset_time", st.reset_time},
        {"budget_n", opt(st.budget_n)},
        {"target_apt", opt(st.target_apt)},
        {"per_tile_cost", st.per_tile_cost},
        {"iou_window", st.iou_window}}},
      {"memory",
       {{"enabled", s.pipeline.memory_enabled},
        {"buffer_len", m.buffer_len},
        {"match_iou_threshold", m.match_iou_threshold},
        {"evict_after", m.evict_after},
        {"confidence_floor", m.confidence_floor}}},
      {"detector",
       {{"miss_rate", d.miss_rate},
        {"position_noise", d.position_noise},
        {"confidence_lo", d.confidence_lo},
        {"confidence_hi", d.confidence_hi},
        {"per_tile_latency", d.per_tile_latency},
        {"rng_seed", d.rng_seed}}},
      {"frame_overhead", s.pipeline.frame_overhead},
      {"dedup_iou", s.pipeline.dedup_iou},
      {"eval_iou", s.pipeline.eval_iou},
      {"record_wall_clock", s.pipeline.record_wall_clock},
  };
}

RunSettings settings_from_json(const json& j) {
  RunSettings s;
  s.cnn_size = j.at("cnn_size").get<int>();
  s.resize_baseline = j.at("resize_baseline").get<bool>();
  s.resize_exponent = j.at("resize_exponent").get<double>();
  const json& st = j.at("strategy");
  s.pipeline.strategy.kind = parse_strategy(st.at("kind").get<std::string>());
  s.pipeline.strategy.reset_time = st.at("reset_time").get<int>();
  s.pipeline.strategy.budget_n = get_opt<int>(st, "budget_n");
  s.pipeline.strategy.target_apt = get_opt<double>(st, "target_apt");
  s.pipeline.strategy.per_tile_cost = st.at("per_tile_cost").get<double>();
  s.pipeline.strategy.iou_window = st.at("iou_window").get<int>();
  const json& m = j.at("memory");
  s.pipeline.memory_enabled = m.at("enabled").get<bool>();
  s.pipeline.memory.buffer_len = m.at("buffer_len").get<int>();
  s.pipeline.memory.match_iou_threshold = m.at("match_iou_threshold").get<double>();
  s.pipeline.memory.evict_after = m.at("evict_after").get<int>();
  s.pipeline.memory.confidence_floor = m.at("confidence_floor").get<double>();
  const json& d = j.at("detector");
  s.detector.miss_rate = d.at("miss_rate").get<double>();
  s.detector.position_noise = d.at("position_noise").get<double>();
  s.detector.confidence_lo = d.at("confidence_lo").get<double>();
  s.detector.confidence_hi = d.at("confidence_hi").get<double>();
  s.detector.per_tile_latency = d.at("per_tile_latency").get<double>();
  s.detector.rng_seed = d.at("rng_seed").get<std::uint64_t>();
  s.pipeline.frame_overhead = j.at("frame_overhead").get<double>();
  s.pipeline.dedup_iou = j.at("dedup_iou").get<double>();
  s.pipeline.eval_iou = j.at("eval_iou").get<double>();
  s.pipeline.record_wall_clock = j.at("record_wall_clock").get<bool>();
  return s;
}

json stats_json(const std::vector<TileStats>& stats) {
  json a = json::array();
  for (const TileStats& s : stats) {
    a.push_back(json::array({s.objects, s.cum_iou, s.not_selected, s.frames_since_detection}));
  }
  return a;
}

std::vector<TileStats> stats_from_json(const json& a) {
  std::vector<TileStats> out;
  for (const json& e : a) {
    out.push_back(TileStats{e.at(0).get<int>(), e.at(1).get<double>(), e.at(2).get<int>(),
                            e.at(3).get<int>()});
  }
  return out;
}

json frame_json(const FrameResult& f, bool wall_clock) {
  json dets = json::array();
  for (const OutputBox& b : f.detections) {
    dets.push_back(json::array({b.box.x, b.box.y, b.box.w, b.box.h, b.box.confidence,
                                b.box.class_id, b.tile}));
  }
  json j{{"frame", f.frame},
         {"selected", f.selected_tiles},
         {"time", f.processing_time},
         {"tp", f.eval.true_positives},
         {"fn", f.eval.false_negatives},
         {"fp", f.eval.false_positives},
         {"calls", f.detector_calls},
         {"tile_objects", f.tile_objects},
         {"tile_gt", f.tile_gt},
         {"stats", stats_json(f.selection_stats)},
         {"detections", dets}};
  if (wall_clock) j["wall_time"] = f.wall_time;
  return j;
}

FrameResult frame_from_json(const json& j) {
  FrameResult f;
  f.frame = j.at("frame").get<long long>();
  f.selected_tiles = j.at("selected").get<std::vector<std::size_t>>();
  f.processing_time = j.at("time").get<double>();
  f.eval.true_positives = j.at("tp").get<long long>();
  f.eval.false_negatives = j.at("fn").get<long long>();
  f.eval.false_positives = j.at("fp").get<long long>();
  f.detector_calls = j.at("calls").get<int>();
  f.tile_objects = j.at("tile_objects").get<std::vector<int>>();
  f.tile_gt = j.at("tile_gt").get<std::vector<int>>();
  f.selection_stats = stats_from_json(j.at("stats"));
  for (const json& d : j.at("detections")) {
    OutputBox b;
    b.box = Box{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>(),
                d.at(3).get<double>(), d.at(4).get<double>(), d.at(5).get<int>()};
    b.tile = d.at(6).get<std::size_t>();
    f.detections.push_back(b);
  }
  if (j.contains("wall_time")) f.wall_time = j.at("wall_time").get<double>();
  return f;
}

json summary_json(const RunSummary& s) {
  return json{{"frames", s.frames},
              {"tiles", s.tiles},
              {"tp", s.true_positives},
              {"fn", s.false_negatives},
              {"fp", s.false_positives},
              {"sen", opt(s.sen)},
              {"apt", opt(s.apt)},
              {"mean_selected", s.mean_selected},
              {"detector_calls", s.detector_calls},
              {"selection_counts", s.selection_counts}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.frames = j.at("frames").get<std::size_t>();
  s.tiles = j.at("tiles").get<std::size_t>();
  s.true_positives = j.at("tp").get<long long>();
  s.false_negatives = j.at("fn").get<long long>();
  s.false_positives = j.at("fp").get<long long>();
  s.sen = get_opt<double>(j, "sen");
  s.apt = get_opt<double>(j, "apt");
  s.mean_selected = j.at("mean_selected").get<double>();
  s.detector_calls = j.at("detector_calls").get<long long>();
  s.selection_counts = j.at("selection_counts").get<std::vector<long long>>();
  return s;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

std::string to_text(const Report& r) {
  json tiles = json::array();
  for (const Box& t : r.grid.tiles) tiles.push_back(json::array({t.x, t.y, t.w, t.h}));
  json head{{"schema_version", kReportSchemaVersion},
            {"kind", "stp-report"},
            {"scenario",
             {{"name", r.scenario_name},
              {"fingerprint", hex64(r.scenario_fingerprint)},
              {"frame_w", r.frame_w},
              {"frame_h", r.frame_h}}},
            {"settings", settings_json(r.settings)},
            {"grid",
             {{"cols", r.grid.cols},
              {"rows", r.grid.rows},
              {"cnn_size", r.grid.cnn_size},
              {"overlap_x", r.grid.overlap_x},
              {"overlap_y", r.grid.overlap_y},
              {"tiles", tiles}}}};
  std::string out = head.dump();
  out += '\n';
  const bool wall = r.settings.pipeline.record_wall_clock;
  for (const FrameResult& f : r.frames) {
    out += frame_json(f, wall).dump();
    out += '\n';
  }
  out += json{{"summary", summary_json(r.summary)}}.dump();
  out += '\n';
  return out;
}

Report report_from_text(std::string_view text) {
  std::vector<json> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ReportError(std::string("corrupt report: ") + e.what());
    }
  }
  if (lines.size() < 2) throw ReportError("corrupt report: missing header or summary");

  Report r;
  try {
    const json& head = lines.front();
    if (head.value("kind", "") != "stp-report") throw ReportError("not a report file");
    if (head.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw ReportError("unsupported report schema_version");
    }
    const json& sc = head.at("scenario");
    r.scenario_name = sc.at("name").get<std::string>();
    r.scenario_fingerprint = std::stoull(sc.at("fingerprint").get<std::string>(), nullptr, 16);
    r.frame_w = sc.at("frame_w").get<int>();
    r.frame_h = sc.at("frame_h").get<int>();
    r.settings = settings_from_json(head.at("settings"));
    const json& g = head.at("grid");
    r.grid.cols = g.at("cols").get<int>();
    r.grid.rows = g.at("rows").get<int>();
    r.grid.cnn_size = g.at("cnn_size").get<int>();
    r.grid.overlap_x = g.at("overlap_x").get<double>();
    r.grid.overlap_y = g.at("overlap_y").get<double>();
    r.grid.frame_w = r.frame_w;
    r.grid.frame_h = r.frame_h;
    for (const json& t : g.at("tiles")) {
      r.grid.tiles.push_back(Box{t.at(0).get<double>(), t.at(1).get<double>(),
                                 t.at(2).get<double>(), t.at(3).get<double>(), 1.0, 0});
    }
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) r.frames.push_back(frame_from_json(lines[i]));
    if (!lines.back().contains("summary")) throw ReportError("corrupt report: missing summary");
    r.summary = summary_from_json(lines.back().at("summary"));
  } catch (const json::exception& e) {
    throw ReportError(std::string("corrupt report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ReportError(std::string("corrupt report: ") + e.what());
  }
  return r;
}

void save_report(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot write report " + path.string());
  out << to_text(report);
  if (!out) throw ReportError("write failed for " + path.string());
}

Report load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot open report " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_text(buf.str());
}

void print_summary(std::ostream& os, const Report& r) {
  const RunSummary& s = r.summary;
  auto show = [](const std::optional<double>& v, int prec) {
    if (!v) return std::string("n/a");
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << *v;
    return o.str();
  };
  os << "scenario   " << r.scenario_name << " (" << r.frame_w << "x" << r.frame_h << ", "
     << s.frames << " frames)\n";
  os << "config     " << r.label() << ", " << s.tiles << " tiles (" << r.grid.cols << "x"
     << r.grid.rows << ")\n";
  os << "SEN        " << show(s.sen, 4) << "  (TP " << s.true_positives << ", FN "
     << s.false_negatives << ", FP " << s.false_positives << ")\n";
  os << "APT        " << show(s.apt, 6) << " s/frame\n";
  os << "tiles/frame " << std::fixed << std::setprecision(3) << s.mean_selected << "\n";
  os.unsetf(std::ios::floatfield);
}

void write_tile_telemetry(std::ostream& os, const Report& r) {
  const std::size_t n = r.grid.size();
  std::vector<long long> cumulative(n, 0);
  os << "frame,tile,selected,objects,gt,cumulative_selected\n";
  for (const FrameResult& f : r.frames) {
    std::vector<bool> selected(n, false);
    for (std::size_t t : f.selected_tiles) {
      if (t < n) selected[t] = true;
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (selected[t]) cumulative[t] += 1;
      os << f.frame << ',' << t << ',' << (selected[t] ? 1 : 0) << ','
         << (t < f.tile_objects.size() ? f.tile_objects[t] : 0) << ','
         << (t < f.tile_gt.size() ? f.tile_gt[t] : 0) << ',' << cumulative[t] << '\n';
    }
  }
}

TileTotals tile_totals(const Report& r) {
  const std::size_t n = r.grid.size();
  TileTotals totals{std::vector<long long>(n, 0), std::vector<long long>(n, 0)};
  for (const FrameResult& f : r.frames) {
    for (std::size_t t : f.selected_tiles) {
      if (t < n) totals.selections[t] += 1;
    }
    for (std::size_t t = 0; t < n && t < f.tile_objects.size(); ++t) {
      totals.objects[t] += f.tile_objects[t];
    }
  }
  return totals;
}

}  // namespace stp
