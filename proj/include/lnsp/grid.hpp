#ifndef LNSP_GRID_HPP
#define LNSP_GRID_HPP

#include <optional>
#include <vector>

#include "lnsp/geo.hpp"

namespace lnsp {

/// Uniform square-cell partition of a bounding box. Cells are half-open:
/// a point on a cell boundary belongs to the cell to its northeast.
/// Cell indices are row-major: index = row * cols + col.
struct GridSpec {
  GeoPoint origin;   // southwest corner
  PlanarRef ref;     // planar frame shared with the road network
  double cell_size = 100.0;
  int cols = 0;
  int rows = 0;

  int cell_count() const { return cols * rows; }

  std::optional<int> cell_of_xy(const XY& p) const {
    XY o = ref.to_xy(origin);
    double dx = p.x - o.x;
    double dy = p.y - o.y;
    int c = static_cast<int>(std::floor(dx / cell_size));
    int r = static_cast<int>(std::floor(dy / cell_size));
    if (c < 0 || c >= cols || r < 0 || r >= rows) return std::nullopt;
    return r * cols + c;
  }

  std::optional<int> cell_of(const GeoPoint& p) const {
    return cell_of_xy(ref.to_xy(p));
  }

  int col_of(int cell) const { return cell % cols; }
  int row_of(int cell) const { return cell / cols; }

  /// Center of a cell in the planar frame.
  XY cell_center(int cell) const {
    XY o = ref.to_xy(origin);
    return {o.x + (col_of(cell) + 0.5) * cell_size,
            o.y + (row_of(cell) + 0.5) * cell_size};
  }

  /// 4-adjacent neighbors that stay inside the grid.
  std::vector<int> neighbors4(int cell) const {
    std::vector<int> out;
    int c = col_of(cell), r = row_of(cell);
    if (c > 0) out.push_back(cell - 1);
    if (c + 1 < cols) out.push_back(cell + 1);
    if (r > 0) out.push_back(cell - cols);
    if (r + 1 < rows) out.push_back(cell + cols);
    return out;
  }

  bool adjacent4(int a, int b) const {
    int dc = col_of(a) - col_of(b);
    int dr = row_of(a) - row_of(b);
    return std::abs(dc) + std::abs(dr) == 1;
  }
};

}  // namespace lnsp

#endif
