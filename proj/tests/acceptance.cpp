// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stp/analysis.hpp"
#include "stp/metrics.hpp"
#include "stp/pipeline.hpp"
#include "stp/report.hpp"
#include "stp/rng.hpp"
#include "stp/scenario.hpp"

namespace fs = std::filesystem;
using namespace stp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int g_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body,
            double time_limit = 0.0) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0.0 && secs >= time_limit) {
    std::ostringstream os;
    os << "took " << secs << " s, limit " << time_limit << " s";
    o.fail(os.str());
  }
  if (!o.pass) ++g_failures;
  std::printf("%s [%2d] %s (%.3f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

std::vector<fs::path> shipped_scenarios() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fs::path(STP_DATA_DIR) / "scenarios")) {
    if (e.path().extension() == ".scenario") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Scenario shipped(const std::string& stem) {
  return load_scenario(fs::path(STP_DATA_DIR) / "scenarios" / (stem + ".scenario"));
}

Scenario blank(int frames) {
  GeneratorParams p;
  p.frames = frames;
  p.objects = 0;
  return generate_scenario(p);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Outcome grid_geometry() {
  Outcome o;
  const std::map<int, std::size_t> expected{{544, 2}, {352, 6}, {256, 12}};
  for (const auto& [cnn, count] : expected) {
    const std::size_t got = compute_grid({960, 544, cnn}).size();
    if (got != count) o.fail("cnn " + std::to_string(cnn) + " gave " + std::to_string(got) + " tiles");
  }
  SplitMix64 rng(0x5eed);
  for (int k = 0; k < 50; ++k) {
    const int w = static_cast<int>(rng.range(8, 160));
    const int h = static_cast<int>(rng.range(8, 160));
    const int s = static_cast<int>(rng.range(4, std::min(w, h)));
    const TileGrid g = compute_grid({w, h, s});
    std::vector<char> hit(std::size_t(w) * std::size_t(h), 0);
    for (const Box& t : g.tiles) {
      if (t.x < 0 || t.y < 0 || t.right() > w || t.bottom() > h) o.fail("tile outside frame");
      for (int y = int(t.y); y < int(t.bottom()); ++y) {
        for (int x = int(t.x); x < int(t.right()); ++x) hit[std::size_t(y) * std::size_t(w) + std::size_t(x)] = 1;
      }
    }
    if (std::count(hit.begin(), hit.end(), 0) != 0) {
      o.fail("uncovered pixels for " + std::to_string(w) + "x" + std::to_string(h) + " s=" + std::to_string(s));
    }
  }
  if (o.pass) o.detail = "2/6/12 tiles, 50 random grids fully covered";
  return o;
}

Outcome perfect_oracle_ceiling() {
  Outcome o;
  int runs = 0;
  for (const fs::path& p : shipped_scenarios()) {
    const Scenario sc = load_scenario(p);
    for (int cnn : {544, 352, 256}) {
      RunSettings rs;
      rs.cnn_size = cnn;
      rs.pipeline.strategy.kind = StrategyKind::TA;
      const Report r = execute(sc, rs);
      ++runs;
      if (r.summary.sen != 1.0) {
        o.fail(p.stem().string() + "@" + std::to_string(cnn) + " SEN " +
               (r.summary.sen ? fmt(*r.summary.sen) : "n/a"));
      }
    }
  }
  if (runs == 0) o.fail("no shipped scenarios");
  if (o.pass) o.detail = "SEN 1.000 on " + std::to_string(runs) + " scenario/size runs";
  return o;
}

Outcome round_robin_fairness() {
  Outcome o;
  const int k = 10;
  for (int cnn : {544, 352, 256}) {
    const TileGrid g = compute_grid({960, 544, cnn});
    const Scenario sc = blank(k * int(g.size()));
    PipelineConfig cfg;
    cfg.strategy.kind = StrategyKind::T1;
    OracleDetector det(DetectorModel{});
    const ScenarioRun run = run_scenario(sc, g, cfg, det);
    for (long long c : run.summary.selection_counts) {
      if (c != k) o.fail("N_T=" + std::to_string(g.size()) + " tile count " + std::to_string(c));
    }
  }
  if (o.pass) o.detail = "each tile exactly 10 times for N_T in {2, 6, 12}";
  return o;
}

Outcome reset_coverage() {
  Outcome o;
  const Scenario sc = shipped("walk_100");
  if (sc.frames.size() != 100) o.fail("walk_100 does not have 100 frames");
  RunSettings rs;
  rs.cnn_size = 256;
  rs.pipeline.strategy.kind = StrategyKind::TO;
  rs.pipeline.strategy.reset_time = 10;
  rs.detector.miss_rate = 0.1;
  rs.detector.position_noise = 2.0;
  const Report r = execute(sc, rs);
  const std::size_t n = r.grid.size();
  for (std::size_t start = 0; start + 10 <= r.frames.size(); ++start) {
    std::set<std::size_t> seen;
    for (std::size_t f = start; f < start + 10; ++f) {
      seen.insert(r.frames[f].selected_tiles.begin(), r.frames[f].selected_tiles.end());
    }
    if (seen.size() != n) o.fail("window at frame " + std::to_string(start) + " misses a tile");
  }
  if (o.pass) {
    o.detail = "91 windows over 100 frames, mean " + fmt(r.summary.mean_selected) + " of " +
               std::to_string(n) + " tiles per frame";
  }
  return o;
}

// Brute force: every N-subset, highest total score, ties to the
// lexicographically smallest index set.
std::vector<std::size_t> brute_force_top(const std::vector<double>& v, std::size_t n) {
  std::vector<std::size_t> best;
  double best_sum = -1.0;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double sum) {
    if (cur.size() == n) {
      if (sum > best_sum + 1e-9) {
        best_sum = sum;
        best = cur;
      }
      return;
    }
    if (i == v.size() || v.size() - i < n - cur.size()) return;
    cur.push_back(i);
    rec(i + 1, sum + v[i]);
    cur.pop_back();
    rec(i + 1, sum);
  };
  rec(0, 0.0);
  return best;
}

Outcome tsm_correctness() {
  Outcome o;
  const Scenario sc = shipped("crowd_60");
  if (sc.frames.size() != 60) o.fail("crowd_60 does not have 60 frames");
  std::size_t frames_checked = 0;
  for (int budget : {1, 3, 5}) {
    RunSettings rs;
    rs.cnn_size = 256;
    rs.pipeline.strategy.kind = StrategyKind::TSM;
    rs.pipeline.strategy.budget_n = budget;
    rs.detector.miss_rate = 0.2;
    rs.detector.position_noise = 2.0;
    const Report r = execute(sc, rs);
    for (const FrameResult& f : r.frames) {
      std::vector<oracle::RawStats> raw;
      for (const TileStats& t : f.selection_stats) {
        raw.push_back({double(t.objects), t.cum_iou, double(t.not_selected),
                       double(t.frames_since_detection)});
      }
      const auto expect = brute_force_top(oracle::ref_tile_values(raw), std::size_t(budget));
      if (expect != f.selected_tiles) {
        o.fail("budget " + std::to_string(budget) + " frame " + std::to_string(f.frame) + " differs");
      }
      ++frames_checked;
    }
  }
  if (o.pass) o.detail = std::to_string(frames_checked) + " frames match subset enumeration (N = 1, 3, 5)";
  return o;
}

Outcome workload_ordering() {
  Outcome o;
  const Scenario sc = shipped("street_30");
  const double cost = 0.25;
  const int budget = 4;
  auto run_apt = [&](StrategyKind kind) {
    RunSettings rs;
    rs.cnn_size = 256;
    rs.pipeline.strategy.kind = kind;
    rs.pipeline.strategy.budget_n = budget;
    rs.pipeline.frame_overhead = 0.0;
    rs.detector.per_tile_latency = cost;
    rs.detector.miss_rate = 0.1;
    const Report r = execute(sc, rs);
    return *r.summary.apt;
  };
  const double t1 = run_apt(StrategyKind::T1);
  const double tsm = run_apt(StrategyKind::TSM);
  const double ta = run_apt(StrategyKind::TA);
  if (t1 != 1 * cost) o.fail("APT(T1) " + fmt(t1));
  if (tsm != budget * cost) o.fail("APT(TSM) " + fmt(tsm));
  if (ta != 12 * cost) o.fail("APT(TA) " + fmt(ta));
  if (!(t1 < tsm && tsm < ta)) o.fail("ordering violated");
  o.detail = "T1 " + fmt(t1) + " < TSM(N=4) " + fmt(tsm) + " < TA " + fmt(ta);
  return o;
}

Outcome memory_retention() {
  Outcome o;
  const Scenario sc = shipped("static_60");
  RunSettings rs;
  rs.cnn_size = 352;
  rs.pipeline.strategy.kind = StrategyKind::T1;
  const Report r = execute(sc, rs);
  const std::size_t n = r.grid.size();
  if (n != 6) o.fail("expected 6 tiles");
  for (const FrameResult& f : r.frames) {
    if (f.frame >= static_cast<long long>(n) && f.eval.false_negatives != 0) {
      o.fail("frame " + std::to_string(f.frame) + " missed " + std::to_string(f.eval.false_negatives));
    }
  }
  const double sen = r.summary.sen.value_or(0.0);
  if (sen < 0.9) o.fail("pooled SEN " + fmt(sen));
  if (o.pass) o.detail = "SEN 1 from frame 6, pooled " + fmt(sen);
  return o;
}

Outcome budget_utilization() {
  Outcome o;
  const Scenario sc = shipped("crowd_60");
  std::ostringstream detail;
  for (int cnn : {544, 352, 256}) {
    RunSettings rs;
    rs.cnn_size = cnn;
    const std::size_t n_tiles = compute_grid({sc.frame_w, sc.frame_h, cnn}).size();
    const double cost = rs.detector.per_tile_latency;
    const double n = std::ceil(0.35 * double(n_tiles));
    rs.pipeline.strategy.kind = StrategyKind::TSM;
    rs.pipeline.strategy.per_tile_cost = cost;
    rs.pipeline.strategy.target_apt = n * cost;
    rs.detector.miss_rate = 0.1;
    const Report r = execute(sc, rs);
    const double limit = 0.35 * double(n_tiles) + 1.0;
    if (r.summary.mean_selected > limit) {
      o.fail("N_T=" + std::to_string(n_tiles) + " mean " + fmt(r.summary.mean_selected));
    }
    detail << (cnn == 544 ? "" : ", ") << r.summary.mean_selected << "/" << n_tiles;
  }
  if (o.pass) o.detail = "mean selected " + detail.str();
  return o;
}

Outcome tradeoff_direction() {
  Outcome o;
  std::ostringstream detail;
  for (const fs::path& p : shipped_scenarios()) {
    const Scenario sc = load_scenario(p);
    RunSettings base;
    base.cnn_size = 352;
    base.resize_baseline = true;
    base.pipeline.memory_enabled = false;
    base.detector.miss_rate = 0.05;
    base.detector.position_noise = 1.0;
    const double resized = effective_model(base, sc.frame_w, sc.frame_h).miss_rate;
    if (resized < 0.4) o.fail("resized miss rate " + fmt(resized));

    RunSettings tsm = base;
    tsm.resize_baseline = false;
    tsm.pipeline.memory_enabled = true;
    tsm.pipeline.strategy.kind = StrategyKind::TSM;
    tsm.pipeline.strategy.budget_n = 2;

    const std::vector<Report> reports{execute(sc, base), execute(sc, tsm)};
    const auto rows = compare(reports);
    const double d = rows[1].delta_sen.value_or(-1.0);
    const double ratio = rows[1].apt_ratio.value_or(1e9);
    if (!(d > 0.0)) o.fail(p.stem().string() + " delta SEN " + fmt(d));
    if (ratio > 2.0) o.fail(p.stem().string() + " APT ratio " + fmt(ratio));
    detail << (detail.tellp() ? ", " : "") << p.stem().string() << " dSEN " << d << " xAPT " << ratio;
  }
  if (o.pass) o.detail = detail.str();
  return o;
}

Outcome determinism() {
  Outcome o;
  const Scenario sc = shipped("street_30");
  const fs::path dir = fs::temp_directory_path() / "stp_acceptance_determinism";
  fs::create_directories(dir);
  int runs = 0;
  for (StrategyKind kind : {StrategyKind::TA, StrategyKind::T1, StrategyKind::TO, StrategyKind::TSM}) {
    RunSettings rs;
    rs.cnn_size = 256;
    rs.pipeline.strategy.kind = kind;
    rs.pipeline.strategy.budget_n = 3;
    rs.detector.miss_rate = 0.3;
    rs.detector.position_noise = 3.0;
    rs.detector.rng_seed = 1234;
    save_report(execute(sc, rs), dir / "a.report");
    save_report(execute(sc, rs), dir / "b.report");
    auto bytes = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    if (bytes(dir / "a.report") != bytes(dir / "b.report")) {
      o.fail(std::string(to_string(kind)) + " reports differ");
    }
    ++runs;
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = std::to_string(runs) + " strategies, byte-identical report files";
  return o;
}

Outcome matching_oracle() {
  Outcome o;
  SplitMix64 rng(20240611);
  int max_card_agree = 0;
  const int instances = 200;
  for (int k = 0; k < instances; ++k) {
    const std::size_t n_gt = static_cast<std::size_t>(rng.range(0, 5));
    const std::size_t n_pred = static_cast<std::size_t>(rng.range(0, 5));
    std::vector<Box> gt;
    std::vector<Box> pred;
    for (std::size_t i = 0; i < n_gt; ++i) gt.push_back(oracle::random_box(rng, 100, 10, 40));
    for (std::size_t i = 0; i < n_pred; ++i) {
      Box b = (n_gt > 0 && rng.uniform() < 0.8)
                  ? gt[static_cast<std::size_t>(rng.range(0, long(n_gt) - 1))]
                  : oracle::random_box(rng, 100, 10, 40);
      b.x += rng.uniform(-8, 8);
      b.y += rng.uniform(-8, 8);
      b.w *= rng.uniform(0.8, 1.2);
      pred.push_back(b);
    }
    const EvalCounts c = match_detections(gt, pred, 0.5);
    const auto w = oracle::iou_matrix(gt, pred);
    const auto best = oracle::best_assignment(w, 0.5);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const MatchedPair& m : c.matches) got.emplace_back(m.gt, m.pred);
    std::sort(got.begin(), got.end());
    if (got != best.pairs) o.fail("instance " + std::to_string(k) + " pairs differ");
    if (c.true_positives + c.false_negatives != static_cast<long long>(n_gt) ||
        c.true_positives + c.false_positives != static_cast<long long>(n_pred)) {
      o.fail("instance " + std::to_string(k) + " counts inconsistent");
    }
    if (best.pairs.size() == oracle::max_cardinality(w, 0.5)) ++max_card_agree;
  }
  if (o.pass) {
    o.detail = std::to_string(instances) + " instances equal the exhaustive assignment; " +
               std::to_string(max_card_agree) + " also reach maximum cardinality";
  }
  return o;
}

}  // namespace

int main() {
  report(1, "grid geometry", grid_geometry, 1.0);
  report(2, "perfect-oracle ceiling", perfect_oracle_ceiling, 5.0);
  report(3, "round-robin fairness", round_robin_fairness);
  report(4, "TO reset coverage", reset_coverage);
  report(5, "TSM selection equals brute-force top-N", tsm_correctness);
  report(6, "workload ordering", workload_ordering);
  report(7, "memory retention", memory_retention);
  report(8, "TSM budget utilization", budget_utilization);
  report(9, "trade-off direction vs resize baseline", tradeoff_direction);
  report(10, "determinism", determinism);
  report(11, "matching oracle", matching_oracle);
  std::printf("%d of 11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
