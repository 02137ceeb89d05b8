#pragma once

// Internals shared between the stationary and self-similar solvers. Not part
// of the public headers.

#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

// boost 1.74 pchip calls isnan unqualified; make the std overloads visible.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"
#include "kscrit/stationary.hpp"

namespace kscrit::detail {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using pchip_t = boost::math::interpolators::pchip<std::vector<double>>;

// pchip consumes its arguments; this keeps the caller's vectors intact.
inline pchip_t make_pchip(const std::vector<double>& x, const std::vector<double>& y) {
  auto xc = x;
  auto yc = y;
  return pchip_t(std::move(xc), std::move(yc));
}

// Internal fixed-point resolution for a requested tolerance (powers of two so
// coarse output grids sample internal nodes exactly).
inline int internal_cells_for_tol(double tol) {
  if (tol >= 1e-7) return 1 << 16;
  if (tol >= 1e-9) return 1 << 18;
  return 1 << 20;
}

// Local fixed point shared by (P_a) (eps = 0) and (Q_eps) (a = 1, eps > 0).
Profile picard_local_impl(double a, double eps, const Parameters& params, double delta,
                          double tol);

double default_handoff(double a, double q);

struct ShootResult {
  std::vector<double> values;
  double A = kInfinity;
  double M = 0.0;
};

// Adaptive-RK continuation from the Picard handoff with the (weighted) bracket
// integral carried as an extra state; locates the flat point by bisection.
ShootResult shoot_ode(double a, double eps, const Parameters& params, const Grid& out,
                      const Profile& local, double tol);

struct FixedPointResult {
  std::vector<double> x, u, du;
  double A = kInfinity;
  double M = 0.0;
  int iterations = 0;
};

// Closed-form fixed point route on an internal graded grid.
FixedPointResult integral_fixed_point(double eps, const Parameters& params, double x_max,
                                      double tol, int n);

StationaryProfile package_fixed_point(FixedPointResult&& r, const Parameters& params,
                                      double x_max, int n_out, double a_slope,
                                      SolverTag tag);

// Memoized U_1 reference profile on [0, A+1] (integral-equation route).
std::shared_ptr<const StationaryProfile> u1_reference(const Parameters& params, double tol);

}  // namespace kscrit::detail
