#pragma once

#include <cstddef>

namespace otto {

// Uniform 1-D grid: n nodes on [x_min, x_max], spacing h = (x_max - x_min)/(n-1).
struct Grid {
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t n = 2048;

  double h() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double node(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
  bool operator==(const Grid&) const = default;
};

}  // namespace otto
