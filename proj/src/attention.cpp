#include "stp/attention.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stp {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::TA: return "ta";
    case StrategyKind::T1: return "t1";
    case StrategyKind::TO: return "to";
    case StrategyKind::TSM: return "tsm";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ta") return StrategyKind::TA;
  if (lower == "t1") return StrategyKind::T1;
  if (lower == "to") return StrategyKind::TO;
  if (lower == "tsm") return StrategyKind::TSM;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected ta, t1, to or tsm)");
}

void StrategyConfig::validate() const {
  if (reset_time < 1) throw std::invalid_argument("reset_time must be >= 1");
  if (budget_n && *budget_n < 1) throw std::invalid_argument("budget_n must be >= 1");
  if (target_apt && !(*target_apt > 0.0)) throw std::invalid_argument("target_apt must be > 0");
  if (target_apt && !budget_n && !(per_tile_cost > 0.0)) {
    throw std::invalid_argument("target_apt requires a positive per_tile_cost");
  }
  if (per_tile_cost < 0.0) throw std::invalid_argument("per_tile_cost must be >= 0");
  if (iou_window < 1) throw std::invalid_argument("iou_window must be >= 1");
}

std::size_t resolve_budget(const StrategyConfig& cfg, std::size_t tile_count) {
  if (tile_count == 0) return 0;
  long long n = 1;
  if (cfg.budget_n) {
    n = *cfg.budget_n;
  } else if (cfg.target_apt && cfg.per_tile_cost > 0.0) {
    // The small slack keeps exact multiples (e.g. 0.3 / 0.1) from rounding down.
    n = static_cast<long long>(std::floor(*cfg.target_apt / cfg.per_tile_cost + 1e-9));
  }
  n = std::clamp<long long>(n, 1, static_cast<long long>(tile_count));
  return static_cast<std::size_t>(n);
}

SelectionState::SelectionState(std::size_t tile_count)
    : stats(tile_count), last_processed(tile_count, -1), iou_history(tile_count) {}

std::vector<std::size_t> select_ta(const SelectionState& /*state*/, const TileGrid& grid) {
  std::vector<std::size_t> all(grid.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

std::size_t select_t1(SelectionState& state, const TileGrid& grid) {
  if (grid.size() == 0) throw std::invalid_argument("empty grid");
  if (state.round_robin_cursor >= grid.size()) state.round_robin_cursor = 0;
  const std::size_t pick = state.round_robin_cursor;
  state.round_robin_cursor = (pick + 1) % grid.size();
  return pick;
}

std::vector<std::size_t> select_to(SelectionState& state, const TileGrid& grid,
                                   const StrategyConfig& cfg) {
  std::vector<std::size_t> out;
  const bool first = std::all_of(state.last_processed.begin(), state.last_processed.end(),
                                 [](long long f) { return f < 0; });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const long long last = state.last_processed[i];
    const bool has_objects = state.stats[i].objects > 0;
    const bool overdue = last < 0 ? state.frame >= cfg.reset_time
                                  : state.frame - last >= cfg.reset_time;
    if (first || has_objects || overdue) out.push_back(i);
  }
  if (out.size() == grid.size()) {
    state.frames_since_full_sweep = 0;
  } else {
    state.frames_since_full_sweep += 1;
  }
  return out;
}

CriteriaMaxima criteria_maxima(std::span<const TileStats> stats) {
  CriteriaMaxima m;
  for (const TileStats& s : stats) {
    m.objects = std::max(m.objects, s.objects);
    m.cum_iou = std::max(m.cum_iou, s.cum_iou);
    m.not_selected = std::max(m.not_selected, s.not_selected);
    m.frames_since_detection = std::max(m.frames_since_detection, s.frames_since_detection);
  }
  return m;
}

namespace {

double ratio(double value, double max) { return max > 0.0 ? value / max : 0.0; }

constexpr double kScoreGrid = 1e9;

}  // namespace

double tile_value(const TileStats& stats, const CriteriaMaxima& maxima) {
  return ratio(stats.objects, maxima.objects) +
         (1.0 - ratio(stats.cum_iou, maxima.cum_iou)) +
         ratio(stats.not_selected, maxima.not_selected) +
         ratio(stats.frames_since_detection, maxima.frames_since_detection);
}

std::vector<double> tile_values(std::span<const TileStats> stats) {
  const CriteriaMaxima m = criteria_maxima(stats);
  std::vector<double> v;
  v.reserve(stats.size());
  for (const TileStats& s : stats) v.push_back(tile_value(s, m));
  return v;
}

std::vector<std::size_t> select_tsm(const SelectionState& state, const TileGrid& grid,
                                    const StrategyConfig& cfg) {
  const std::size_t n = resolve_budget(cfg, grid.size());
  // Scores are sums of small-integer ratios, so mathematically equal scores
  // can differ in the last bits. Rank on a fixed grid so those still tie.
  const std::vector<double> values = tile_values(state.stats);
  std::vector<long long> ranked(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) ranked[i] = std::llround(values[i] * kScoreGrid);
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranked[a] > ranked[b]; });
  order.resize(std::min(n, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> select_tiles(SelectionState& state, const TileGrid& grid,
                                      const StrategyConfig& cfg) {
  switch (cfg.kind) {
    case StrategyKind::TA: return select_ta(state, grid);
    case StrategyKind::T1: return {select_t1(state, grid)};
    case StrategyKind::TO: return select_to(state, grid, cfg);
    case StrategyKind::TSM: return select_tsm(state, grid, cfg);
  }
  return {};
}

const TileStats& update_stats(SelectionState& state, std::size_t tile,
                              const TileOutcome& outcome, const StrategyConfig& cfg) {
  if (tile >= state.stats.size()) throw std::out_of_range("tile index out of range");
  TileStats& s = state.stats[tile];
  if (!outcome.selected) {
    s.not_selected += 1;
    s.frames_since_detection += 1;
    return s;
  }

  s.not_selected = 0;
  state.last_processed[tile] = state.frame;
  s.objects = outcome.live_tracks;

  auto& hist = state.iou_history[tile];
  hist.push_back(outcome.match.iou_sum());
  while (hist.size() > static_cast<std::size_t>(cfg.iou_window)) hist.pop_front();
  s.cum_iou = std::accumulate(hist.begin(), hist.end(), 0.0);

  if (outcome.detections > 0) {
    s.frames_since_detection = 0;
  } else {
    s.frames_since_detection += 1;
  }
  return s;
}

}  // namespace stp
