#include "kscrit/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "kscrit/errors.hpp"
#include "kscrit/quadrature.hpp"
#include "stationary_detail.hpp"

namespace kscrit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

int grid_cells_for_tol(double /*tol*/) { return 1 << 13; }

// --------------------------------------------------------------------------
// Local Picard construction on [0, delta].
// --------------------------------------------------------------------------

namespace detail {

// Shared local fixed point for the stationary (eps = 0) and perturbed problems:
// F(u)(x) = a x - int_0^x int_0^y (u/s) u'^q s^{q-1} ds dy
//           + eps int_0^x int_0^y u' s^{q-1} ds dy.
Profile picard_local_impl(double a, double eps, const Parameters& params, double delta,
                          double tol) {
  const double q = params.q;
  if (a < 0.0) throw invalid_input("picard_local: a must be >= 0");
  if (!(delta > 0.0)) throw invalid_input("picard_local: delta must be positive");
  // The O(h^2) quadrature bias of this stage propagates into the handoff state
  // (and from there into the flat-point location), so resolution follows tol.
  const int n = (tol >= 1e-8) ? 2048 : 16384;
  if (a == 0.0 && eps == 0.0) {
    Grid g = Grid::graded(delta, params.N, n);
    return Profile(g, std::vector<double>(g.n_nodes(), 0.0), 0.0);
  }

  // Contraction condition (ball radius a/2 around the linear part):
  // (3a/2)^{1+q} delta^q / q <= a/2, plus the eps term's share for eps > 0.
  auto contraction_ok = [&](double d) {
    const double dq = std::pow(d, q);
    double lhs = std::pow(1.5 * a, 1.0 + q) * dq / q;
    if (eps > 0.0) lhs += eps * (1.5 * a) * dq / q * d;
    return lhs <= 0.5 * a;
  };
  int shrink = 0;
  while (!contraction_ok(delta)) {
    delta *= 0.5;
    if (++shrink > 200) throw no_convergence("picard_local: contraction never achieved");
  }

  Grid g = Grid::graded(delta, params.N, n);
  const auto& x = g.nodes;
  std::vector<double> u(n + 1), du(n + 1, a), phi(n + 1), integ(n + 1);
  for (int i = 0; i <= n; ++i) u[i] = a * x[i];

  const int max_iter = 500;
  double prev_change = kInf;
  int rising = 0;
  for (int it = 0; it < max_iter; ++it) {
    phi[0] = a * std::pow(std::max(du[0], 0.0), q);
    for (int i = 1; i <= n; ++i)
      phi[i] = (u[i] / x[i]) * std::pow(std::max(du[i], 0.0), q);
    auto J = quad::cumulative_power_weight(x, phi, q - 1.0);
    std::vector<double> du_new(n + 1), u_new;
    if (eps > 0.0) {
      auto Je = quad::cumulative_power_weight(x, du, q - 1.0);
      for (int i = 0; i <= n; ++i) du_new[i] = a - J[i] + eps * Je[i];
    } else {
      for (int i = 0; i <= n; ++i) du_new[i] = a - J[i];
    }
    u_new = quad::cumulative_trapezoid(x, du_new);
    double change = 0.0;
    for (int i = 0; i <= n; ++i) {
      change = std::max(change, std::abs(du_new[i] - du[i]));
      change = std::max(change, std::abs(u_new[i] - u[i]));
    }
    du.swap(du_new);
    u.swap(u_new);
    if (change < tol * std::max(1.0, a)) {
      for (int i = 0; i + 1 <= n; ++i) u[i + 1] = std::max(u[i + 1], u[i]);
      return Profile(std::move(g), std::move(u), a);
    }
    rising = (change > prev_change) ? rising + 1 : 0;
    if (rising >= 3)
      throw no_convergence("picard_local: update norm increased 3 sweeps in a row");
    prev_change = change;
  }
  throw no_convergence("picard_local: iteration cap reached");
}

double default_handoff(double a, double q) {
  if (a <= 0.0) return 0.05;
  return std::min(0.05, std::pow(q / 4.0, 1.0 / q) / a);
}

}  // namespace detail

Profile picard_local(double a, const Parameters& params, double delta, double tol) {
  return detail::picard_local_impl(a, 0.0, params, delta, tol);
}

// --------------------------------------------------------------------------
// Shooting continuation with the bracket-located flat point.
// --------------------------------------------------------------------------

namespace detail {

// Integrates (u, u', I) with I = int u * ker(s) * s^{q-2} ds from the Picard
// handoff, sampling at the output nodes. The bracket b = b0 - (1-q) I crosses
// zero transversally at the flat point; values beyond are clamped to the
// plateau. Shared by the stationary (eps = 0, b0 = a^{1-q}) and perturbed
// (eps > 0, a = 1, b0 = 1) problems.
ShootResult shoot_ode(double a, double eps, const Parameters& params, const Grid& out,
                      const Profile& local, double tol) {
  namespace odeint = boost::numeric::odeint;
  using state_t = std::array<double, 3>;
  const double q = params.q;
  const double b0 = (eps > 0.0) ? 1.0 : std::pow(a, 1.0 - q);
  const double kfac = eps * (1.0 - q) / q;  // kernel exponent factor

  auto kernel = [&](double xx) { return (eps > 0.0) ? std::exp(-kfac * std::pow(xx, q)) : 1.0; };
  auto rhs = [&](const state_t& y, state_t& dy, double xx) {
    const double V = y[0];
    const double W = std::max(y[1], 0.0);
    const double x2q = std::pow(xx, 2.0 - q);
    dy[0] = W;
    dy[1] = (eps * xx * W - V * std::pow(W, q)) / x2q;
    dy[2] = V * kernel(xx) / x2q;
  };

  const auto& xp = local.grid.nodes;
  double x_leg = xp.back();  // start of the current integration leg

  // State at the handoff: u, u' from the Picard profile, I by singular quadrature.
  std::vector<double> phi(xp.size());
  phi[0] = a * kernel(0.0);
  for (std::size_t i = 1; i < xp.size(); ++i)
    phi[i] = (local.values[i] / xp[i]) * kernel(xp[i]);
  const double I_delta = quad::cumulative_power_weight(xp, phi, q - 1.0).back();
  auto dloc = derivative_samples(local);

  state_t y = {local.values.back(), dloc.back(), I_delta};

  // The flat point is read off the bracket integral y[2]; its accumulated
  // drift divided by the (small) bracket slope sets the A error, so integrate
  // well below the requested tolerance.
  const double rtol = std::max(1e-12, 1e-3 * tol);
  auto stepper = odeint::make_controlled(rtol * 1e-3, rtol,
                                         odeint::runge_kutta_dopri5<state_t>());

  auto u_local = make_pchip(xp, local.values);

  ShootResult res;
  const auto& xo = out.nodes;
  res.values.assign(xo.size(), 0.0);

  std::size_t j = 0;
  for (; j < xo.size() && xo[j] <= x_leg; ++j)
    res.values[j] = (xo[j] == 0.0) ? 0.0 : u_local(xo[j]);

  bool flat = false;
  for (; j < xo.size(); ++j) {
    const double x_next = xo[j];
    if (!flat) {
      const state_t y_leg = y;
      try {
        odeint::integrate_adaptive(stepper, rhs, y, x_leg, x_next,
                                   std::min(1e-4, (x_next - x_leg) * 0.5));
      } catch (const std::exception& e) {
        throw numerical_failure(std::string("solve_Pa: integrator failed: ") + e.what(),
                                x_leg);
      }
      const double b = b0 - (1.0 - q) * y[2];
      if (b <= 0.0) {
        // Root of the bracket inside (x_leg, x_next]: bisect by re-integrating
        // from the last bracket-positive state.
        double lo = x_leg;
        state_t y_lo = y_leg;
        double hi = x_next;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          state_t ym = y_lo;
          odeint::integrate_adaptive(stepper, rhs, ym, lo, mid,
                                     std::min(1e-5, (mid - lo) * 0.5));
          if (b0 - (1.0 - q) * ym[2] > 0.0) {
            lo = mid;
            y_lo = ym;
          } else {
            hi = mid;
          }
        }
        res.A = 0.5 * (lo + hi);
        res.M = y_lo[0];
        flat = true;
        res.values[j] = res.M;
        continue;
      }
      res.values[j] = y[0];
      x_leg = x_next;
    } else {
      res.values[j] = res.M;
    }
  }
  if (!flat) res.M = res.values.back();

  // Snap out integration-level wiggles: monotone, capped at the plateau.
  for (std::size_t i = 0; i + 1 < res.values.size(); ++i)
    res.values[i + 1] = std::max(res.values[i + 1], res.values[i]);
  if (flat)
    for (auto& v : res.values) v = std::min(v, res.M);
  return res;
}

}  // namespace detail

StationaryProfile solve_Pa(double a, const Parameters& params, double x_max, double tol) {
  if (!(x_max > 0.0)) throw invalid_input("solve_Pa: x_max must be positive");
  if (a < 0.0) throw invalid_input("solve_Pa: a must be >= 0");
  if (!(tol > 0.0)) throw invalid_input("solve_Pa: tol must be positive");
  const int n_out = grid_cells_for_tol(tol);
  Grid out = Grid::graded(x_max, params.N, n_out);

  StationaryProfile sp;
  sp.a = a;
  sp.solver_tag = SolverTag::picard_rk;
  if (a == 0.0) {
    sp.profile = Profile(out, std::vector<double>(out.n_nodes(), 0.0), 0.0);
    sp.max_value = 0.0;
    sp.flat_point = 0.0;
    return sp;
  }

  const double delta = std::min(detail::default_handoff(a, params.q), 0.5 * x_max);
  Profile local = detail::picard_local_impl(a, 0.0, params, delta, 0.01 * tol);

  auto res = detail::shoot_ode(a, 0.0, params, out, local, tol);
  sp.profile = Profile(out, std::move(res.values), a);
  sp.max_value = res.M;
  sp.flat_point = res.A;
  return sp;
}

// --------------------------------------------------------------------------
// Integral-equation fixed point (independent route).
// --------------------------------------------------------------------------

namespace detail {

// Fixed point of u' = e^{eps x^q / q} (b0 - (1-q) int (u/s) ker(s) s^{q-1})_+^{1/(1-q)}
// on a graded internal grid; eps = 0 gives the stationary problem with b0 = 1 (a = 1).
FixedPointResult integral_fixed_point(double eps, const Parameters& params, double x_max,
                                      double tol, int n) {
  const double q = params.q;
  Grid g = Grid::graded(x_max, params.N, n);
  auto& x = g.nodes;

  FixedPointResult r;
  std::vector<double> ker(n + 1, 1.0), growth(n + 1, 1.0);
  if (eps > 0.0) {
    const double kfac = eps * (1.0 - q) / q;
    for (int i = 0; i <= n; ++i) {
      const double xq = std::pow(x[i], q);
      ker[i] = std::exp(-kfac * xq);
      growth[i] = std::exp(eps * xq / q);
    }
  }

  std::vector<double> u(x.begin(), x.end());  // start from the linear part
  std::vector<double> du(n + 1, 1.0), phi(n + 1), b(n + 1);
  const double pw = 1.0 / (1.0 - q);

  const int max_iter = 400;
  double prev_change = kInf;
  int rising = 0;
  for (int it = 0; it < max_iter; ++it) {
    phi[0] = du[0] * ker[0];
    for (int i = 1; i <= n; ++i) phi[i] = (u[i] / x[i]) * ker[i];
    auto I = quad::cumulative_power_weight(x, phi, q - 1.0);
    double change = 0.0;
    for (int i = 0; i <= n; ++i) {
      b[i] = 1.0 - (1.0 - q) * I[i];
      double d = (b[i] > 0.0) ? growth[i] * std::pow(b[i], pw) : 0.0;
      change = std::max(change, std::abs(d - du[i]));
      du[i] = d;
    }
    auto u_new = quad::cumulative_trapezoid(x, du);
    for (int i = 0; i <= n; ++i) change = std::max(change, std::abs(u_new[i] - u[i]));
    u.swap(u_new);
    r.iterations = it + 1;
    if (change < 0.1 * tol) break;
    rising = (change > prev_change) ? rising + 1 : 0;
    if (rising >= 3)
      throw no_convergence("integral_equation_solve: update norm increased 3 sweeps");
    prev_change = change;
    if (it + 1 == max_iter)
      throw no_convergence("integral_equation_solve: iteration cap reached");
  }

  // Flat point: first sign change of the bracket, located by linear interpolation
  // (the bracket is C^1 and crosses transversally).
  for (int i = 1; i <= n; ++i) {
    if (b[i] <= 0.0) {
      const double t = b[i - 1] / (b[i - 1] - b[i]);
      r.A = x[i - 1] + t * (x[i] - x[i - 1]);
      r.M = u[i - 1] + t * (u[i] - u[i - 1]);
      break;
    }
  }
  if (r.A == kInf) r.M = u.back();
  r.x = std::move(x);
  r.u = std::move(u);
  r.du = std::move(du);
  return r;
}

// Downsamples an internal power-of-two fixed-point run onto the coarser output
// grid (every K-th node lands exactly on an output node), clamping the plateau.
StationaryProfile package_fixed_point(FixedPointResult&& r, const Parameters& params,
                                      double x_max, int n_out, double a_slope,
                                      SolverTag tag) {
  const int n_int = static_cast<int>(r.x.size()) - 1;
  const int K = n_int / n_out;
  Grid out = Grid::graded(x_max, params.N, n_out);
  std::vector<double> v(n_out + 1);
  for (int jj = 0; jj <= n_out; ++jj) {
    double val = r.u[static_cast<std::size_t>(jj) * K];
    if (r.x[static_cast<std::size_t>(jj) * K] >= r.A) val = r.M;
    v[jj] = std::min(val, r.M > 0.0 ? r.M : val);
  }
  for (int jj = 0; jj + 1 <= n_out; ++jj) v[jj + 1] = std::max(v[jj + 1], v[jj]);

  StationaryProfile sp;
  sp.a = a_slope;
  sp.solver_tag = tag;
  sp.profile = Profile(std::move(out), std::move(v), a_slope);
  sp.max_value = r.M;
  sp.flat_point = r.A;
  return sp;
}

}  // namespace detail

StationaryProfile integral_equation_solve(const Parameters& params, double x_max,
                                          double tol) {
  if (!(x_max > 0.0)) throw invalid_input("integral_equation_solve: x_max must be positive");
  if (!(tol > 0.0)) throw invalid_input("integral_equation_solve: tol must be positive");
  const int n_int = detail::internal_cells_for_tol(tol);
  auto r = detail::integral_fixed_point(0.0, params, x_max, tol, n_int);
  return detail::package_fixed_point(std::move(r), params, x_max, grid_cells_for_tol(tol),
                                     1.0, SolverTag::integral_equation);
}

// --------------------------------------------------------------------------
// Critical constants with memoized cross-validation.
// --------------------------------------------------------------------------

namespace detail {

struct ConstantsCacheEntry {
  CriticalConstants constants;
  std::shared_ptr<const StationaryProfile> u1;  // integral-equation route, [0, A+1]
};

const ConstantsCacheEntry& constants_entry(const Parameters& params, double tol) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, ConstantsCacheEntry> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(params.N, tol);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  // Probe for the flat point with cheap doubling runs, then solve on [0, A+1].
  double x_max = 8.0;
  double A_est = kInf;
  for (int k = 0; k < 16; ++k) {
    auto probe = integral_fixed_point(0.0, params, x_max, 1e-6, 1 << 15);
    if (probe.A < kInf) {
      A_est = probe.A;
      break;
    }
    x_max *= 2.0;
  }
  if (A_est == kInf)
    throw no_convergence("critical_constants: flat point not found within probe window");

  const double window = A_est + 1.0;
  const int n_int = internal_cells_for_tol(tol);
  auto fine = integral_fixed_point(0.0, params, window, tol, n_int);
  auto half = integral_fixed_point(0.0, params, window, tol, n_int / 2);
  const double internal_est =
      (std::abs(fine.A - half.A) + std::abs(fine.M - half.M)) / 3.0;

  auto ie = package_fixed_point(std::move(fine), params, window,
                                grid_cells_for_tol(tol), 1.0,
                                SolverTag::integral_equation);
  auto rk = solve_Pa(1.0, params, window, tol);
  const double disagreement =
      std::abs(ie.flat_point - rk.flat_point) + std::abs(ie.max_value - rk.max_value);
  if (disagreement > 100.0 * tol)
    throw inconsistency_error("critical_constants: solver routes disagree beyond 100*tol");

  ConstantsCacheEntry e;
  e.constants.N = params.N;
  e.constants.M = ie.max_value;
  e.constants.A = ie.flat_point;
  e.constants.M_bar = std::pow(params.N, params.N) * unit_ball_volume(params.N) *
                      e.constants.M;
  e.constants.tol = std::max(disagreement, internal_est);
  e.u1 = std::make_shared<StationaryProfile>(std::move(ie));
  auto res = cache.emplace(key, std::move(e));
  return res.first->second;
}

std::shared_ptr<const StationaryProfile> u1_reference(const Parameters& params, double tol) {
  return constants_entry(params, tol).u1;
}

}  // namespace detail

CriticalConstants critical_constants(const Parameters& params, double tol) {
  if (!(tol > 0.0)) throw invalid_input("critical_constants: tol must be positive");
  return detail::constants_entry(params, tol).constants;
}

MassClassification find_a_for_mass(double m, const Parameters& params, double tol) {
  if (m < 0.0) throw invalid_input("find_a_for_mass: m must be >= 0");
  if (!(tol > 0.0)) throw invalid_input("find_a_for_mass: tol must be positive");
  MassClassification out;
  if (m == 0.0) {
    out.kind = MassClassification::Kind::unique;
    out.a = 0.0;
    return out;
  }
  const double ctol = std::min(tol, 1e-8);
  const auto& entry = detail::constants_entry(params, ctol);
  const double M = entry.constants.M, A = entry.constants.A;
  if (std::abs(m - M) <= tol) {
    out.kind = MassClassification::Kind::continuum;
    out.a = A;
    out.tolerance_band = true;
    return out;
  }
  if (m > M) {
    out.kind = MassClassification::Kind::none;
    return out;
  }

  // U_1 is increasing on [0, A]: bisect U_1(a) = m there.
  const auto& u1 = *entry.u1;
  auto U1 = detail::make_pchip(u1.profile.grid.nodes, u1.profile.values);
  double lo = 0.0, hi = A;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * A; ++it) {
    const double mid = 0.5 * (lo + hi);
    (U1(mid) < m ? lo : hi) = mid;
  }
  out.kind = MassClassification::Kind::unique;
  out.a = 0.5 * (lo + hi);
  return out;
}

}  // namespace kscrit
