#include "kscrit/grid.hpp"

#include <cmath>

#include "kscrit/errors.hpp"

namespace kscrit {

Grid Grid::graded(double x_max, double p, int n_cells) {
  if (!(x_max > 0.0)) throw invalid_input("Grid: x_max must be positive");
  if (!(p > 0.0)) throw invalid_input("Grid: grading exponent must be positive");
  if (n_cells < 1) throw invalid_input("Grid: need at least one cell");
  Grid g;
  g.x_max = x_max;
  g.grading_exponent = p;
  g.n_cells = n_cells;
  g.nodes.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) {
    g.nodes[i] = x_max * std::pow(static_cast<double>(i) / n_cells, p);
  }
  g.nodes[0] = 0.0;
  g.nodes[n_cells] = x_max;  // pow(1, p) == 1, kept explicit
  return g;
}

}  // namespace kscrit
