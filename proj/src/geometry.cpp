#include "stp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace stp {

bool Box::valid() const {
  return w > 0.0 && h > 0.0 && confidence >= 0.0 && confidence <= 1.0;
}

double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Box clip_to(const Box& b, const Box& bounds) {
  Box out = b;
  const double x0 = std::max(b.x, bounds.x);
  const double y0 = std::max(b.y, bounds.y);
  const double x1 = std::min(b.right(), bounds.right());
  const double y1 = std::min(b.bottom(), bounds.bottom());
  out.x = x0;
  out.y = y0;
  out.w = std::max(0.0, x1 - x0);
  out.h = std::max(0.0, y1 - y0);
  return out;
}

int tiles_along(int length, int cnn_size) {
  return (length + cnn_size - 1) / cnn_size;
}

std::vector<int> axis_offsets(int length, int cnn_size, int count) {
  std::vector<int> offsets(static_cast<std::size_t>(count), 0);
  if (count <= 1) return offsets;
  const long long span = length - cnn_size;
  const long long gaps = count - 1;
  for (int i = 0; i < count; ++i) {
    // round(i * span / gaps), half away from zero
    offsets[static_cast<std::size_t>(i)] =
        static_cast<int>((2 * i * span + gaps) / (2 * gaps));
  }
  offsets.back() = static_cast<int>(span);
  return offsets;
}

TileGrid compute_grid(const GridConfig& cfg) {
  if (cfg.input_w <= 0 || cfg.input_h <= 0 || cfg.cnn_size <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (cfg.cnn_size > cfg.input_w || cfg.cnn_size > cfg.input_h) {
    throw std::invalid_argument("cnn size " + std::to_string(cfg.cnn_size) +
                                " exceeds frame " + std::to_string(cfg.input_w) +
                                "x" + std::to_string(cfg.input_h));
  }

  TileGrid grid;
  grid.frame_w = cfg.input_w;
  grid.frame_h = cfg.input_h;
  grid.cnn_size = cfg.cnn_size;
  grid.cols = tiles_along(cfg.input_w, cfg.cnn_size);
  grid.rows = tiles_along(cfg.input_h, cfg.cnn_size);

  const auto xs = axis_offsets(cfg.input_w, cfg.cnn_size, grid.cols);
  const auto ys = axis_offsets(cfg.input_h, cfg.cnn_size, grid.rows);
  const double s = cfg.cnn_size;
  if (grid.cols > 1) grid.overlap_x = s - double(cfg.input_w - cfg.cnn_size) / (grid.cols - 1);
  if (grid.rows > 1) grid.overlap_y = s - double(cfg.input_h - cfg.cnn_size) / (grid.rows - 1);

  grid.tiles.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) {
      grid.tiles.push_back(Box{double(x), double(y), s, s, 1.0, 0});
    }
  }
  return grid;
}

TileGrid whole_frame_grid(int frame_w, int frame_h, int cnn_size) {
  if (frame_w <= 0 || frame_h <= 0 || cnn_size <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  TileGrid grid;
  grid.frame_w = frame_w;
  grid.frame_h = frame_h;
  grid.cnn_size = cnn_size;
  grid.cols = 1;
  grid.rows = 1;
  grid.tiles.push_back(Box{0.0, 0.0, double(frame_w), double(frame_h), 1.0, 0});
  return grid;
}

std::size_t tile_index_of(const TileGrid& grid, const Box& b) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.tiles.size(); ++i) {
    const double dx = grid.tiles[i].cx() - b.cx();
    const double dy = grid.tiles[i].cy() - b.cy();
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

bool center_inside(const Box& b, const Box& tile) {
  const double cx = b.cx();
  const double cy = b.cy();
  return cx >= tile.x && cx <= tile.right() && cy >= tile.y && cy <= tile.bottom();
}

}  // namespace stp
