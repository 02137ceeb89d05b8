#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"

namespace kscrit {

// Regularized gradient nonlinearity f_eps(x) = (x+eps)^q - eps^q.
double f_eps(double x, double eps, double q);

// H(v) = v^{2-q} / ((2-q)(1-q)), the convex integrand of the energy.
double H_of(double v, double q);

// H_eps(x) = int_0^x int_1^y dt/f_eps(t) dy + x/(1-q), evaluated to accuracy tol.
double H_eps(double x, double eps, double q, double tol);

// Energy F(u) = int_0^1 H(u_x) - u^2/(2 x^{2-q}) dx. The singular factor
// x^{q-2} is handled by closed-form power-weight moments; the first cell uses
// u ~ u'(0) x.
double energy_F(const Profile& u, const Parameters& params, double tol);

// Same with H replaced by H_eps.
double energy_F_eps(const Profile& u, const Parameters& params, double eps, double tol);

// Dissipation integral int_0^1 u_t^2 / (x^{2-q} f_eps(u_x)) dx >= 0.
// Requires u_x > 0 at interior nodes (regularized regime).
double dissipation_eps(const Profile& u, const std::vector<double>& u_t, double eps,
                       const Parameters& params);

struct EnergyRecord {
  double t = 0.0;
  double F_value = 0.0;
  std::optional<double> F_eps_value;
  std::optional<double> dissipation;
};

struct AuditReport {
  bool pass = true;
  std::vector<std::size_t> flagged;  // indices i where F(t_{i+1}) > F(t_i) + tol
  double worst_increase = 0.0;
};

// Flags every adjacent increase of F_value beyond tol.
AuditReport audit_monotonicity(const std::vector<EnergyRecord>& records, double tol);

}  // namespace kscrit
