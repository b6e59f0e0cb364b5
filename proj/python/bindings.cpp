#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "stp/analysis.hpp"
#include "stp/cli.hpp"
#include "stp/metrics.hpp"
#include "stp/report.hpp"
#include "stp/scenario.hpp"

namespace py = pybind11;
using namespace stp;

namespace {

RunSettings make_settings(const std::string& strategy, int cnn_size, std::optional<int> budget_n,
                          std::optional<double> target_apt, double per_tile_cost, int reset_time,
                          double miss_rate, double noise, std::uint64_t seed, double overhead,
                          bool memory, bool resize_baseline, double resize_exponent) {
  RunSettings rs;
  rs.cnn_size = cnn_size;
  rs.pipeline.strategy.kind = parse_strategy(strategy);
  rs.pipeline.strategy.budget_n = budget_n;
  rs.pipeline.strategy.target_apt = target_apt;
  rs.pipeline.strategy.per_tile_cost = per_tile_cost;
  rs.pipeline.strategy.reset_time = reset_time;
  rs.pipeline.frame_overhead = overhead;
  rs.pipeline.memory_enabled = memory;
  rs.detector.miss_rate = miss_rate;
  rs.detector.position_noise = noise;
  rs.detector.rng_seed = seed;
  rs.detector.per_tile_latency = per_tile_cost;
  rs.resize_baseline = resize_baseline;
  rs.resize_exponent = resize_exponent;
  return rs;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["frames"] = s.frames;
  d["tiles"] = s.tiles;
  d["tp"] = s.true_positives;
  d["fn"] = s.false_negatives;
  d["fp"] = s.false_positives;
  d["sen"] = s.sen;
  d["apt"] = s.apt;
  d["mean_selected"] = s.mean_selected;
  d["detector_calls"] = s.detector_calls;
  d["selection_counts"] = s.selection_counts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selective tile processing simulator";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<ReportError>(m, "ReportError", PyExc_ValueError);

  py::class_<Box>(m, "Box")
      .def(py::init([](double x, double y, double w, double h, double confidence, int class_id) {
             return Box{x, y, w, h, confidence, class_id};
           }),
           py::arg("x"), py::arg("y"),
           py::arg("w"), py::arg("h"), py::arg("confidence") = 1.0, py::arg("class_id") = 0)
      .def_readwrite("x", &Box::x)
      .def_readwrite("y", &Box::y)
      .def_readwrite("w", &Box::w)
      .def_readwrite("h", &Box::h)
      .def_readwrite("confidence", &Box::confidence)
      .def_readwrite("class_id", &Box::class_id)
      .def("__eq__", [](const Box& a, const Box& b) { return a == b; })
      .def("__repr__", [](const Box& b) {
        std::ostringstream os;
        os << "Box(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
        return os.str();
      });

  m.def("iou", &iou, py::arg("a"), py::arg("b"));

  m.def(
      "tile_grid",
      [](int width, int height, int cnn_size) {
        const TileGrid g = compute_grid({width, height, cnn_size});
        return py::make_tuple(g.tiles, g.cols, g.rows);
      },
      py::arg("width"), py::arg("height"), py::arg("cnn_size"),
      "Tiles (row-major), columns and rows for a frame. Raises ValueError for bad sizes.");

  m.def(
      "match",
      [](const std::vector<Box>& gt, const std::vector<Box>& pred, double threshold) {
        const EvalCounts c = match_detections(gt, pred, threshold);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (const MatchedPair& p : c.matches) pairs.emplace_back(p.gt, p.pred);
        return py::make_tuple(c.true_positives, c.false_negatives, c.false_positives, pairs);
      },
      py::arg("gt"), py::arg("pred"), py::arg("iou_threshold") = 0.5,
      "Returns (tp, fn, fp, [(gt_index, pred_index), ...]).");

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("frame_w", &Scenario::frame_w)
      .def_readonly("frame_h", &Scenario::frame_h)
      .def_property_readonly("name", [](const Scenario& s) { return s.meta.name; })
      .def_property_readonly("frame_count", [](const Scenario& s) { return s.frames.size(); })
      .def("object_count", &Scenario::object_count)
      .def("fingerprint", [](const Scenario& s) { return fingerprint(s); })
      .def("frame_boxes",
           [](const Scenario& s, std::size_t i) {
             std::vector<std::pair<long long, Box>> out;
             for (const GtObject& o : s.frames.at(i).gt) out.emplace_back(o.id, o.box);
             return out;
           })
      .def("to_text", [](const Scenario& s) { return to_text(s); })
      .def("save", [](const Scenario& s, const std::filesystem::path& p) { save_scenario(s, p); });

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("scenario_from_text", [](const std::string& t) { return from_text(t); }, py::arg("text"));

  m.def(
      "generate_scenario",
      [](int frames, int objects, std::uint64_t seed, int width, int height, const std::string& motion,
         double min_speed, double max_speed, bool enter_exit, int min_lifetime, const std::string& name) {
        GeneratorParams p;
        p.frames = frames;
        p.objects = objects;
        p.seed = seed;
        p.frame_w = width;
        p.frame_h = height;
        if (motion == "static") {
          p.motion = MotionModel::Static;
        } else if (motion == "linear") {
          p.motion = MotionModel::Linear;
        } else {
          throw std::invalid_argument("motion must be 'static' or 'linear'");
        }
        p.min_speed = min_speed;
        p.max_speed = max_speed;
        p.enter_exit = enter_exit;
        p.min_lifetime = min_lifetime;
        p.name = name;
        return generate_scenario(p);
      },
      py::arg("frames") = 30, py::arg("objects") = 10, py::arg("seed") = 1, py::arg("width") = 960,
      py::arg("height") = 544, py::arg("motion") = "linear", py::arg("min_speed") = 0.5,
      py::arg("max_speed") = 3.0, py::arg("enter_exit") = false, py::arg("min_lifetime") = 10,
      py::arg("name") = "synthetic");

  py::class_<Report>(m, "Report")
      .def_property_readonly("label", &Report::label)
      .def_property_readonly("tiles", [](const Report& r) { return r.grid.size(); })
      .def_property_readonly("summary", [](const Report& r) { return summary_dict(r.summary); })
      .def_property_readonly("selected_tiles",
                             [](const Report& r) {
                               std::vector<std::vector<std::size_t>> out;
                               for (const FrameResult& f : r.frames) out.push_back(f.selected_tiles);
                               return out;
                             })
      .def("to_text", [](const Report& r) { return to_text(r); })
      .def("save", [](const Report& r, const std::filesystem::path& p) { save_report(r, p); })
      .def("telemetry", [](const Report& r) {
        std::ostringstream os;
        write_tile_telemetry(os, r);
        return os.str();
      });

  m.def("load_report", &load_report, py::arg("path"));

  m.def(
      "run",
      [](const Scenario& scenario, const std::string& strategy, int cnn_size,
         std::optional<int> budget_n, std::optional<double> target_apt, double per_tile_cost,
         int reset_time, double miss_rate, double noise, std::uint64_t seed, double overhead,
         bool memory, bool resize_baseline, double resize_exponent) {
        const RunSettings rs =
            make_settings(strategy, cnn_size, budget_n, target_apt, per_tile_cost, reset_time,
                          miss_rate, noise, seed, overhead, memory, resize_baseline, resize_exponent);
        py::gil_scoped_release release;
        return execute(scenario, rs);
      },
      py::arg("scenario"), py::arg("strategy") = "tsm", py::arg("cnn_size") = 352,
      py::arg("budget_n") = py::none(), py::arg("target_apt") = py::none(),
      py::arg("per_tile_cost") = 0.025, py::arg("reset_time") = 10, py::arg("miss_rate") = 0.0,
      py::arg("noise") = 0.0, py::arg("seed") = 0, py::arg("overhead") = 0.0,
      py::arg("memory") = true, py::arg("resize_baseline") = false,
      py::arg("resize_exponent") = 1.0);

  m.def(
      "compare",
      [](const std::vector<Report>& reports, std::size_t baseline) {
        py::list rows;
        for (const TradeoffRow& r : compare(reports, baseline)) {
          py::dict d;
          d["config"] = r.label;
          d["tiles"] = r.tiles;
          d["sen"] = r.sen;
          d["apt"] = r.apt;
          d["delta_sen"] = r.delta_sen;
          d["apt_ratio"] = r.apt_ratio;
          rows.append(d);
        }
        return rows;
      },
      py::arg("reports"), py::arg("baseline") = 0);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the stp command line; returns (exit_code, stdout, stderr).");
}
