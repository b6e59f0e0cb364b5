#pragma once

#include <cstddef>
#include <vector>

namespace stp {

/// Axis-aligned rectangle in frame pixels (top-left origin) with a detector
/// confidence and a class label.
struct Box {
  double x = 0.0;  // left edge
  double y = 0.0;  // top edge
  double w = 0.0;
  double h = 0.0;
  double confidence = 1.0;
  int class_id = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double area() const { return w * h; }

  /// True when w, h > 0 and confidence lies in [0, 1].
  bool valid() const;

  friend bool operator==(const Box&, const Box&) = default;
};

/// Intersection over union. Symmetric, 1 for identical boxes, 0 when the
/// boxes do not overlap.
double iou(const Box& a, const Box& b);

/// Area of the intersection of two boxes (0 when disjoint).
double intersection_area(const Box& a, const Box& b);

/// `b` clipped to the bounds of `bounds`. The result may have zero extent
/// when the boxes are disjoint.
Box clip_to(const Box& b, const Box& bounds);

enum class OverlapPolicy { UniformStretch };

struct GridConfig {
  int input_w = 0;
  int input_h = 0;
  int cnn_size = 0;  // side of the square network input
  OverlapPolicy overlap_policy = OverlapPolicy::UniformStretch;
};

/// Layout of square tiles covering a frame. Tiles are stored row-major from
/// the top-left corner.
struct TileGrid {
  std::vector<Box> tiles;
  int cols = 0;
  int rows = 0;
  double overlap_x = 0.0;  // s - exact pitch; 0 for a single column
  double overlap_y = 0.0;
  int frame_w = 0;
  int frame_h = 0;
  int cnn_size = 0;

  std::size_t size() const { return tiles.size(); }
  const Box& operator[](std::size_t i) const { return tiles[i]; }
};

/// Number of tiles along an axis of `length` pixels: ceil(length / cnn_size).
int tiles_along(int length, int cnn_size);

/// Integer offsets of `count` tiles of side `cnn_size` spread with uniform
/// pitch over an axis of `length` pixels. The first offset is 0 and the last
/// is flush with `length - cnn_size`.
std::vector<int> axis_offsets(int length, int cnn_size, int count);

/// Tile layout for a frame. Throws std::invalid_argument when a dimension is
/// non-positive or cnn_size exceeds either frame side.
TileGrid compute_grid(const GridConfig& cfg);

/// Single tile spanning the whole frame. Models feeding a resized full frame
/// to the network; `cnn_size` records the network side the frame is shrunk to.
TileGrid whole_frame_grid(int frame_w, int frame_h, int cnn_size);

/// Index of the tile whose center is nearest the center of `b`; ties go to
/// the lowest index.
std::size_t tile_index_of(const TileGrid& grid, const Box& b);

/// True when the center of `b` lies inside `tile` (edges inclusive).
bool center_inside(const Box& b, const Box& tile);

}  // namespace stp
