#pragma once

#include <vector>

#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"

namespace kscrit {

enum class SolverTag { picard_rk, integral_equation };

// Stationary profile U_a: solution of x^{2-q} u'' + u u'^q = 0, u(0)=0, u'(0)=a,
// constant beyond its flat point.
struct StationaryProfile {
  double a = 0.0;
  Profile profile;
  double max_value = 0.0;
  double flat_point = 0.0;  // +inf sentinel when not reached within [0, x_max]
  SolverTag solver_tag = SolverTag::picard_rk;
};

// Critical constants of the dichotomy: M = max U_1, A = first maximizer,
// M_bar = N^N * V_N * M the cell-mass critical value.
struct CriticalConstants {
  int N = 3;
  double M = 0.0;
  double A = 0.0;
  double M_bar = 0.0;
  double tol = 0.0;  // certified accuracy (solver disagreement + internal estimates)
};

// Local solution on [0, delta] by Picard iteration of
// F(u)(x) = a x - int_0^x int_0^y (u/s) u'^q s^{q-1} ds dy.
// Checks the contraction condition and halves delta until it holds.
Profile picard_local(double a, const Parameters& params, double delta, double tol);

// Shooting solver: Picard start near 0, adaptive RK continuation, flat point
// located by the sign change of the bracket 1 - (1-q) int_0^x u/s^{2-q} ds
// (transversal crossing), profile clamped constant beyond.
StationaryProfile solve_Pa(double a, const Parameters& params, double x_max, double tol);

// Independent route: fixed-point iteration of the integral representation
// u' = (1 - (1-q) int_0^x u/s^{2-q} ds)_+^{1/(1-q)}, u = int u'.
StationaryProfile integral_equation_solve(const Parameters& params, double x_max, double tol);

// M, A from the integral-equation route cross-validated against solve_Pa(1).
CriticalConstants critical_constants(const Parameters& params, double tol);

// Classification of the stationary problem at boundary mass m.
struct MassClassification {
  enum class Kind { unique, continuum, none } kind = Kind::none;
  double a = 0.0;             // Unique: the shooting slope; Continuum: a_min = A
  bool tolerance_band = false;  // m within tol of M
};

MassClassification find_a_for_mass(double m, const Parameters& params, double tol);

// Internal knob shared by the solvers: output resolution for a requested tolerance.
int grid_cells_for_tol(double tol);

}  // namespace kscrit
