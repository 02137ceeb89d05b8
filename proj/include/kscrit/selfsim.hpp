#pragma once

#include <vector>

#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"

namespace kscrit {

// Solution V_eps of x^{2-q} V'' + V V'^q = eps x V', V(0)=0, V'(0)=1,
// with flat point A_eps, plateau M_eps and a concavity certificate.
struct SelfSimProfile {
  double eps = 0.0;
  Profile profile;
  double A_eps = 0.0;     // +inf sentinel when flatness not detected within x_max
  double M_eps = 0.0;     // plateau value V(A_eps) (sup over the domain otherwise)
  bool concave = false;   // certificate eps*x*V'^{1-q} <= V at all nodes
  double K_eps = 1.0;     // sup V(x)/x (= 1 when concave)
};

// Amplitude law a(t) = a0 (1 - eps a0^q q t)^{-1/q} blowing up at T_star.
struct AmplitudeLaw {
  double a0 = 1.0;
  double eps = 0.0;
  double q = 2.0 / 3.0;
  double T_star = 0.0;

  static AmplitudeLaw make(double a0, double eps, double q);
};

double amplitude(const AmplitudeLaw& law, double t);

// Picard + adaptive RK with the weighted bracket
// 1 - (1-q) int_0^x V e^{-eps(1-q)s^q/q} / s^{2-q} ds
// locating A_eps; cross-checked against the closed-form fixed point
// V' = e^{eps x^q/q} (bracket)_+^{1/(1-q)}.
SelfSimProfile solve_Qeps(double eps, const Parameters& params, double x_max, double tol);

// One row of the critical band table.
struct BandEntry {
  double eps = 0.0;
  double A_eps = 0.0;
  double M_eps = 0.0;     // band value V_eps(A+1)
  double plateau = 0.0;   // plateau value V_eps(A_eps)
  bool concave = false;
  bool flat_detected = false;
};

// Tabulates V_eps(A+1) over an eps grid, extending the solve window until the
// flat point is captured for each entry (entries that never flatten are flagged).
std::vector<BandEntry> critical_band(const Parameters& params,
                                     const std::vector<double>& eps_grid, double tol);

// Samples V(a(t) x) on the target grid with monotone cubic interpolation;
// exact plateau value beyond A_eps.
Profile self_similar_field(const SelfSimProfile& V, const AmplitudeLaw& law, double t,
                           const Grid& grid);

}  // namespace kscrit
