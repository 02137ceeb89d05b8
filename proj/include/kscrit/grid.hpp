#pragma once

#include <vector>

namespace kscrit {

// 1-D grid on [0, x_max] with graded nodes x_i = x_max * (i/n)^p.
// Construction is deterministic: identical (x_max, p, n) give bit-identical nodes.
struct Grid {
  double x_max = 1.0;
  double grading_exponent = 1.0;
  int n_cells = 0;
  std::vector<double> nodes;

  static Grid graded(double x_max, double p, int n_cells);
  static Grid uniform(double x_max, int n_cells) { return graded(x_max, 1.0, n_cells); }

  int n_nodes() const { return static_cast<int>(nodes.size()); }

  // Same (x_max, p, n) layout; nodes are then bit-identical by construction.
  bool same_layout(const Grid& other) const {
    return x_max == other.x_max && grading_exponent == other.grading_exponent &&
           n_cells == other.n_cells;
  }
};

}  // namespace kscrit
