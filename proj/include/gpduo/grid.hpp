#pragma once

#include <array>
#include <cstddef>

namespace gpduo {

using Point = std::array<double, 2>;

// Square periodic grid on [-L, L)^2 with n points per side, row-major storage:
// flat index i*n + j holds the node (x_i, y_j), x_i = -L + i*spacing.
struct Grid2D {
  std::size_t n = 0;
  double extent = 0;  // half-width L

  static Grid2D make(std::size_t n, double extent);

  double spacing() const { return 2.0 * extent / static_cast<double>(n); }
  double coordinate(std::size_t i) const { return -extent + static_cast<double>(i) * spacing(); }
  std::size_t size() const { return n * n; }
  Point node(std::size_t flat) const { return {coordinate(flat / n), coordinate(flat % n)}; }
  double cell_area() const { return spacing() * spacing(); }

  bool operator==(const Grid2D&) const = default;
};

}  // namespace gpduo
