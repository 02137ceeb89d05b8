#include "kscrit/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "kscrit/errors.hpp"
#include "kscrit/quadrature.hpp"
#include "kscrit/stationary.hpp"
#include "stationary_detail.hpp"

namespace kscrit {

namespace {

// Nodewise concavity certificate eps*x*V'^{1-q} <= V, with slack for the
// discrete derivative; implies V'' <= 0 and hence sup V/x = V'(0) = 1.
bool concavity_certificate(const Profile& V, double eps, double q, double tol) {
  auto dv = derivative_samples(V);
  const auto& x = V.grid.nodes;
  const double slack =
      tol * std::max(1.0, V.values.empty() ? 1.0 : V.values.back());
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double lhs = eps * x[i] * std::pow(std::max(dv[i], 0.0), 1.0 - q);
    if (lhs > V.values[i] + slack) return false;
  }
  return true;
}

double sup_value_over_x(const Profile& V) {
  double K = V.derivative_at_zero;  // x -> 0 limit of V(x)/x
  const auto& x = V.grid.nodes;
  for (std::size_t i = 1; i < x.size(); ++i) K = std::max(K, V.values[i] / x[i]);
  return K;
}

}  // namespace

SelfSimProfile solve_Qeps(double eps, const Parameters& params, double x_max, double tol) {
  if (!(eps > 0.0) || eps > 1.0) throw invalid_input("solve_Qeps: eps must be in (0, 1]");
  if (!(x_max > 0.0)) throw invalid_input("solve_Qeps: x_max must be positive");
  if (!(tol > 0.0)) throw invalid_input("solve_Qeps: tol must be positive");
  const double q = params.q;
  const int n_out = grid_cells_for_tol(tol);
  Grid out = Grid::graded(x_max, params.N, n_out);

  // Primary route: local series/Picard start continued by adaptive RK.
  const double delta = std::min(detail::default_handoff(1.0, q), 0.5 * x_max);
  Profile local = detail::picard_local_impl(1.0, eps, params, delta, 0.01 * tol);
  auto rk = detail::shoot_ode(1.0, eps, params, out, local, tol);

  // Independent route: closed-form fixed point on a fine grid sharing every
  // output node (power-of-two subsampling), then compare.
  auto fp = detail::integral_fixed_point(eps, params, x_max, tol,
                                         detail::internal_cells_for_tol(tol));
  auto ie = detail::package_fixed_point(std::move(fp), params, x_max, n_out, 1.0,
                                        SolverTag::integral_equation);

  double disagreement = 0.0;
  if (rk.A < detail::kInfinity || ie.flat_point < detail::kInfinity) {
    disagreement += std::abs(rk.A - ie.flat_point) / std::max(1.0, std::abs(rk.A));
    disagreement += std::abs(rk.M - ie.max_value) / std::max(1.0, rk.M);
  }
  double sup_diff = 0.0;
  for (std::size_t i = 0; i < rk.values.size(); ++i)
    sup_diff = std::max(sup_diff, std::abs(rk.values[i] - ie.profile.values[i]));
  disagreement += sup_diff / std::max(1.0, rk.M);
  if (!(disagreement <= 100.0 * tol))
    throw inconsistency_error("solve_Qeps: shooting and fixed-point routes disagree");

  SelfSimProfile sp;
  sp.eps = eps;
  sp.profile = Profile(std::move(out), std::move(rk.values), 1.0);
  sp.A_eps = rk.A;
  sp.M_eps = rk.M;
  sp.concave = concavity_certificate(sp.profile, eps, q, tol);
  sp.K_eps = sp.concave ? 1.0 : sup_value_over_x(sp.profile);
  return sp;
}

AmplitudeLaw AmplitudeLaw::make(double a0, double eps, double q) {
  if (!(a0 > 0.0)) throw invalid_input("AmplitudeLaw: a0 must be positive");
  if (!(eps > 0.0)) throw invalid_input("AmplitudeLaw: eps must be positive");
  if (!(q > 0.0) || q >= 1.0) throw invalid_input("AmplitudeLaw: q must be in (0, 1)");
  AmplitudeLaw law;
  law.a0 = a0;
  law.eps = eps;
  law.q = q;
  law.T_star = 1.0 / (eps * std::pow(a0, q) * q);
  return law;
}

double amplitude(const AmplitudeLaw& law, double t) {
  if (t < 0.0) throw invalid_input("amplitude: t must be >= 0");
  if (t >= law.T_star)
    throw numerical_failure("amplitude: t is at or past the blow-up time", law.T_star);
  const double depletion = law.eps * std::pow(law.a0, law.q) * law.q * t;
  return law.a0 * std::pow(1.0 - depletion, -1.0 / law.q);
}

std::vector<BandEntry> critical_band(const Parameters& params,
                                     const std::vector<double>& eps_grid, double tol) {
  if (eps_grid.empty()) throw invalid_input("critical_band: eps grid is empty");
  for (double e : eps_grid)
    if (!(e > 0.0) || e > 1.0) throw invalid_input("critical_band: eps must be in (0, 1]");

  const auto cc = critical_constants(params, tol);
  std::vector<BandEntry> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    // Flat points move out as eps grows; widen the window until one is caught.
    double x_max = 2.0 * (cc.A + 1.0);
    SelfSimProfile sp;
    bool found = false;
    for (int attempt = 0; attempt < 6; ++attempt) {
      sp = solve_Qeps(eps, params, x_max, tol);
      if (sp.A_eps < detail::kInfinity) {
        found = true;
        break;
      }
      x_max *= 2.0;
    }
    BandEntry row;
    row.eps = eps;
    row.A_eps = sp.A_eps;
    row.plateau = sp.M_eps;
    row.concave = sp.concave;
    row.flat_detected = found;
    auto V = detail::make_pchip(sp.profile.grid.nodes, sp.profile.values);
    const double y = cc.A + 1.0;
    row.M_eps = (sp.A_eps <= y) ? sp.M_eps : V(y);
    rows.push_back(std::move(row));
  }
  return rows;
}

Profile self_similar_field(const SelfSimProfile& V, const AmplitudeLaw& law, double t,
                           const Grid& grid) {
  if (V.eps != law.eps)
    throw invalid_input("self_similar_field: profile and law eps mismatch");
  const double a = amplitude(law, t);  // validates 0 <= t < T_star
  const auto& xs = V.profile.grid.nodes;
  const double domain = xs.back();

  const double stretch = a * grid.x_max;
  if (stretch > domain && !(V.A_eps <= domain))
    throw invalid_input(
        "self_similar_field: a(t)*x_max leaves the solved window before the flat point");

  auto interp = detail::make_pchip(xs, V.profile.values);
  std::vector<double> u(grid.n_nodes());
  for (int i = 0; i < grid.n_nodes(); ++i) {
    const double y = a * grid.nodes[i];
    if (y >= V.A_eps)
      u[i] = V.M_eps;  // exact plateau beyond the flat point
    else
      u[i] = interp(std::min(y, domain));
  }
  for (std::size_t i = 0; i + 1 < u.size(); ++i) u[i + 1] = std::max(u[i + 1], u[i]);
  return Profile(grid, std::move(u), a * V.profile.derivative_at_zero);
}

}  // namespace kscrit
