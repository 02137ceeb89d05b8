#pragma once

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"

namespace kscrit {

enum class Scheme { direct_imex, regularized_imex, transformed };

struct DiagnosticsRecord {
  double t = 0.0;
  double nmax_value = 0.0;
  double F_value = 0.0;
  double dt = 0.0;
  double bd_residual = 0.0;  // |u(1) - m| before boundary enforcement
};

// Mutable time-stepping state for u_t = x^{2-q} u_xx + u g(u_x) on (0,1],
// g = (.)^q or f_eps per scheme. Diffusion is implicit (tridiagonal, exact
// Dirichlet rows), the nonlinearity explicit with acceptance-retry.
struct EvolutionState {
  Parameters params;
  Profile u;
  double t = 0.0;
  double dt = 1e-8;
  Scheme scheme = Scheme::direct_imex;
  double reg_eps = 0.0;

  // scheme knobs. The CFL speed u*u_x^q/max(u_x, guard) already overestimates
  // the transport Lipschitz speed q*u*u_x^{q-1} by 1/q, so cfl = 1 keeps an
  // effective Courant number below one; the guard caps the artificial speed
  // spike at interface nodes where u_x crosses zero.
  double cfl = 1.0;
  double guard = 1e-3;
  double dt_max = std::numeric_limits<double>::infinity();
  double dt_min = 1e-14;
  bool dt_fixed = false;  // disable growth/CFL (cross-scheme comparisons)

  // Grid-static step coefficients, precomputed once (the grid never changes
  // over the state's life): x^{2-q} times the nonuniform second-difference
  // weights, and the smaller adjacent spacing per interior node for the CFL.
  std::vector<double> coeff_wm, coeff_wp, h_local;

  std::vector<DiagnosticsRecord> diagnostics;

  EvolutionState(const Parameters& p, Profile u0, Scheme s = Scheme::direct_imex,
                 double reg = 0.0);
};

enum class StepOutcome { accepted, dt_collapse };

// One accepted IMEX step (or dt_collapse after max halvings).
StepOutcome step(EvolutionState& state);

enum class StopTrigger { nmax_threshold, dt_collapse, horizon_reached };

struct BlowupReport {
  bool blew_up = false;
  double T_estimate = std::numeric_limits<double>::quiet_NaN();
  StopTrigger trigger = StopTrigger::horizon_reached;
  std::optional<double> rate_exponent;
  std::optional<double> rate_fit_r2;
};

struct StoppingRule {
  double nmax_threshold = 1e6;
  double record_interval = 0.1;  // diagnostics cadence in time units
  bool record_energy = true;
};

// Drives step() until horizon / nmax threshold / dt collapse, recording
// diagnostics; on blow-up fits T by regressing nmax^{-q} against t (affine for
// the self-similar law) and the rate exponent by log-log regression.
BlowupReport run_until(EvolutionState& state, double horizon, const StoppingRule& rule);

// Transformed problem w_t = Lap w + N^2 w (w + r w_r / N)^q, radial Laplacian
// of dimension N+2 on the uniform r-grid in [0,1]; w_r(0)=0, w(1)=m.
struct TransformedState {
  Parameters params;
  std::vector<double> r;
  std::vector<double> w;
  double t = 0.0;
  double m = 0.0;

  TransformedState(const Parameters& p, std::vector<double> w0, double m_in);
};

// Advances n_steps of size dt (implicit diffusion, explicit nonlinearity);
// throws constraint_violation if w + r w_r/N drops below -tolerance.
void solve_transformed(TransformedState& state, double dt, int n_steps);

// u(x) = x * w(x^{1/N}) on the target grid; exact nodewise product when the
// target is the graded p=N image of the uniform r-grid.
Profile map_w_to_u(const TransformedState& state, const Grid& grid);

using Trajectory = std::vector<std::pair<double, Profile>>;

// Nodewise ordering audit u_lo <= u_hi + tol at all recorded times.
bool comparison_check(const Trajectory& lo, const Trajectory& hi, double tol);

// Radial cell density and chemoattractant reconstructed from u at output
// radii r_j = x_j^{1/N}; t is a label copied to the output.
struct PhysicalField {
  double t = 0.0;
  std::vector<double> r;
  std::vector<double> rho;
  std::vector<double> c;
  double total_mass = 0.0;
};

PhysicalField reconstruct_physical(const Profile& u, const Parameters& params, double t);

// Shared regression helpers (also used by the experiments layer).
struct RateFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double T_estimate = 0.0;
};

// Joint fit of nmax ~ C (T - t)^{-beta}: T from the affine law nmax^{-q} vs t,
// beta from log-log regression. window_decades selects the trailing growth
// window (points with nmax >= max/10^window).
RateFit fit_rate_from_series(const std::vector<std::pair<double, double>>& t_nmax,
                             double q, double window_decades);

}  // namespace kscrit
