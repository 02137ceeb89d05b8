#include "kscrit/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kscrit/errors.hpp"
#include "kscrit/quadrature.hpp"

namespace kscrit {

namespace {

using gk = boost::math::quadrature::gauss_kronrod<double, 31>;

void check_eps_q(double eps, double q, const char* who) {
  if (!(eps > 0.0)) throw invalid_input(std::string(who) + ": eps must be positive");
  if (!(q > 0.0) || q >= 1.0) throw invalid_input(std::string(who) + ": q must be in (0, 1)");
}

void check_unit_domain(const Profile& u, const char* who) {
  if (std::abs(u.grid.x_max - 1.0) > 1e-9)
    throw invalid_input(std::string(who) + ": profile must live on [0, 1]");
}

// Singular part int_0^1 u^2 / (2 x^{2-q}) dx = int (u/x)^2 / 2 * x^q dx,
// with the bounded node-0 limit u'(0)^2 / 2.
double singular_energy_term(const Profile& u, double q) {
  const auto& x = u.grid.nodes;
  std::vector<double> phi(x.size());
  phi[0] = 0.5 * u.derivative_at_zero * u.derivative_at_zero;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double r = u.values[i] / x[i];
    phi[i] = 0.5 * r * r;
  }
  return quad::cumulative_power_weight(x, phi, q).back();
}

}  // namespace

double f_eps(double x, double eps, double q) {
  check_eps_q(eps, q, "f_eps");
  if (x < 0.0) throw invalid_input("f_eps: x must be >= 0");
  return std::pow(x + eps, q) - std::pow(eps, q);
}

double H_of(double v, double q) {
  if (v < 0.0) throw invalid_input("H_of: v must be >= 0");
  return std::pow(v, 2.0 - q) / ((2.0 - q) * (1.0 - q));
}

// The double integral is flattened by Fubini into single integrals of
// g = 1/f_eps: for x <= 1,
//   H_eps(x) = -int_0^x t g(t) dt - x int_x^1 g(t) dt + x/(1-q),
// and for x > 1,
//   H_eps(x) = -int_0^1 t g(t) dt + int_1^x (x-t) g(t) dt + x/(1-q).
// t*g(t) extends continuously to t = 0 (limit eps^{1-q}/q), so every
// integrand is regular.
double H_eps(double x, double eps, double q, double tol) {
  check_eps_q(eps, q, "H_eps");
  if (x < 0.0) throw invalid_input("H_eps: x must be >= 0");
  if (!(tol > 0.0)) throw invalid_input("H_eps: tol must be positive");
  if (x == 0.0) return 0.0;

  const double eq = std::pow(eps, q);
  auto g = [&](double t) { return 1.0 / (std::pow(t + eps, q) - eq); };
  auto tg = [&](double t) {
    if (t < 1e-300) return std::pow(eps, 1.0 - q) / q;
    return t * g(t);
  };

  const double rtol = 0.1 * tol;
  const int depth = 12;
  double result = x / (1.0 - q);
  if (x <= 1.0) {
    result -= gk::integrate(tg, 0.0, x, depth, rtol);
    if (x < 1.0) result -= x * gk::integrate(g, x, 1.0, depth, rtol);
  } else {
    result -= gk::integrate(tg, 0.0, 1.0, depth, rtol);
    result += gk::integrate([&](double t) { return (x - t) * g(t); }, 1.0, x, depth, rtol);
  }
  return result;
}

double energy_F(const Profile& u, const Parameters& params, double /*tol*/) {
  check_unit_domain(u, "energy_F");
  const double q = params.q;
  const auto& x = u.grid.nodes;
  double gradient_term = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double h = x[j + 1] - x[j];
    const double s = (u.values[j + 1] - u.values[j]) / h;
    gradient_term += H_of(std::max(s, 0.0), q) * h;
  }
  return gradient_term - singular_energy_term(u, q);
}

double energy_F_eps(const Profile& u, const Parameters& params, double eps, double tol) {
  check_unit_domain(u, "energy_F_eps");
  check_eps_q(eps, params.q, "energy_F_eps");
  const double q = params.q;
  const auto& x = u.grid.nodes;
  double gradient_term = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    const double h = x[j + 1] - x[j];
    const double s = (u.values[j + 1] - u.values[j]) / h;
    gradient_term += H_eps(std::max(s, 0.0), eps, q, tol) * h;
  }
  return gradient_term - singular_energy_term(u, q);
}

double dissipation_eps(const Profile& u, const std::vector<double>& u_t, double eps,
                       const Parameters& params) {
  check_unit_domain(u, "dissipation_eps");
  check_eps_q(eps, params.q, "dissipation_eps");
  const auto& x = u.grid.nodes;
  if (u_t.size() != x.size())
    throw invalid_input("dissipation_eps: u_t must be sampled at the profile nodes");
  const double q = params.q;
  auto du = derivative_samples(u);

  // Fold one power of x into the nodal integrand so the remaining weight
  // x^{q-1} is integrable: phi = u_t^2 / (x f_eps(u_x)), phi(0) = 0.
  std::vector<double> phi(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (i + 1 < x.size() && !(du[i] > 0.0))
      throw invalid_input("dissipation_eps: u_x must be positive at interior nodes");
    const double fe = f_eps(std::max(du[i], 0.0), eps, q);
    if (fe > 0.0) {
      phi[i] = u_t[i] * u_t[i] / (x[i] * fe);
    } else if (u_t[i] != 0.0) {
      throw invalid_input("dissipation_eps: flat boundary node with nonzero u_t");
    }
  }
  return quad::cumulative_power_weight(x, phi, q - 1.0).back();
}

AuditReport audit_monotonicity(const std::vector<EnergyRecord>& records, double tol) {
  if (!(tol >= 0.0)) throw invalid_input("audit_monotonicity: tol must be >= 0");
  AuditReport report;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    if (records[i + 1].t < records[i].t)
      throw invalid_input("audit_monotonicity: records must be ordered by t");
    const double jump = records[i + 1].F_value - records[i].F_value;
    report.worst_increase = std::max(report.worst_increase, jump);
    if (jump > tol) report.flagged.push_back(i);
  }
  report.pass = report.flagged.empty();
  return report;
}

}  // namespace kscrit
