#include "kscrit/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "kscrit/errors.hpp"

namespace kscrit {

Profile::Profile(Grid g, std::vector<double> v, double du0)
    : grid(std::move(g)), values(std::move(v)), derivative_at_zero(du0) {
  if (values.size() != grid.nodes.size())
    throw invalid_input("Profile: values/nodes size mismatch");
  if (values.empty()) throw invalid_input("Profile: empty grid");
  if (values[0] != 0.0) throw invalid_input("Profile: values[0] must be 0");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] < values[i])
      throw invalid_input("Profile: values must be nondecreasing");
  }
  if (!std::isfinite(derivative_at_zero) || derivative_at_zero < 0.0)
    throw invalid_input("Profile: derivative_at_zero must be finite and >= 0");
}

namespace {

// Derivative at xe of the quadratic through (x0,f0), (x1,f1), (x2,f2).
double three_point_derivative(double xe, double x0, double f0, double x1, double f1,
                              double x2, double f2) {
  const double w0 = (2.0 * xe - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double w1 = (2.0 * xe - x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double w2 = (2.0 * xe - x0 - x1) / ((x2 - x0) * (x2 - x1));
  return w0 * f0 + w1 * f1 + w2 * f2;
}

}  // namespace

std::vector<double> derivative_samples(const Profile& u) {
  const auto& x = u.grid.nodes;
  const auto& v = u.values;
  const std::size_t n = x.size();
  std::vector<double> du(n);
  if (n < 2) throw invalid_input("derivative_samples: need at least 2 nodes");
  du[0] = u.derivative_at_zero;
  if (n == 2) {
    du[1] = (v[1] - v[0]) / (x[1] - x[0]);
    return du;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    du[i] = three_point_derivative(x[i], x[i - 1], v[i - 1], x[i], v[i], x[i + 1], v[i + 1]);
  }
  du[n - 1] = three_point_derivative(x[n - 1], x[n - 3], v[n - 3], x[n - 2], v[n - 2],
                                     x[n - 1], v[n - 1]);
  return du;
}

double nmax(const Profile& u) {
  const auto& x = u.grid.nodes;
  const auto& v = u.values;
  if (x.size() < 2) throw invalid_input("nmax: grid needs at least 2 nodes");
  double best = u.derivative_at_zero;
  for (std::size_t i = 1; i < x.size(); ++i) best = std::max(best, v[i] / x[i]);
  return best;
}

double c1_distance(const Profile& u, const Profile& v) {
  if (!u.grid.same_layout(v.grid))
    throw invalid_input("c1_distance: profiles must share one grid");
  const auto du = derivative_samples(u);
  const auto dv = derivative_samples(v);
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    d0 = std::max(d0, std::abs(u.values[i] - v.values[i]));
    d1 = std::max(d1, std::abs(du[i] - dv[i]));
  }
  return d0 + d1;
}

YmReport validate_Ym(const Profile& u, double m) {
  YmReport r;
  const auto& v = u.values;
  r.endpoint_zero = !v.empty() && v.front() == 0.0;
  r.mass_residual = v.empty() ? std::numeric_limits<double>::quiet_NaN() : v.back() - m;
  r.endpoint_mass = std::abs(r.mass_residual) <= 1e-12 * std::max(1.0, std::abs(m));
  r.monotone = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] < v[i]) {
      r.monotone = false;
      break;
    }
  }
  if (u.grid.nodes.size() >= 2) {
    const double chord = (v[1] - v[0]) / (u.grid.nodes[1] - u.grid.nodes[0]);
    r.derivative_consistent =
        std::abs(chord - u.derivative_at_zero) <=
        1e-3 * std::max(1.0, std::abs(u.derivative_at_zero));
  }
  return r;
}

}  // namespace kscrit
