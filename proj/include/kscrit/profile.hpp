#pragma once

#include <vector>

#include "kscrit/grid.hpp"

namespace kscrit {

// Grid-sampled monotone profile u with u(0) = 0 and a separately stored u'(0).
// Monotonicity is a hard construction-time invariant, not a tolerance.
class Profile {
 public:
  Grid grid;
  std::vector<double> values;
  double derivative_at_zero = 0.0;

  Profile() = default;
  // Validates: sizes match, values[0] == 0, nondecreasing, derivative finite and >= 0.
  Profile(Grid g, std::vector<double> v, double du0);
};

// Second-order finite-difference derivative samples: 3-point nonuniform stencils
// in the interior and at x_max, the stored derivative_at_zero at node 0.
std::vector<double> derivative_samples(const Profile& u);

// Blow-up functional: max over nodes i >= 1 of u_i/x_i, with the first cell
// represented by derivative_at_zero.
double nmax(const Profile& u);

// C1 distance on a shared grid: max|u - v| + max|u' - v'|.
double c1_distance(const Profile& u, const Profile& v);

// Admissibility report for the class Y_m.
struct YmReport {
  bool endpoint_zero = false;
  bool endpoint_mass = false;
  bool monotone = false;
  bool derivative_consistent = false;
  double mass_residual = 0.0;
  bool pass() const {
    return endpoint_zero && endpoint_mass && monotone && derivative_consistent;
  }
};

YmReport validate_Ym(const Profile& u, double m);

}  // namespace kscrit
