#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

// boost 1.74 pchip calls isnan unqualified; make the std overloads visible.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "kscrit/errors.hpp"
#include "kscrit/params.hpp"
#include "kscrit/stationary.hpp"

using namespace kscrit;

namespace {

// Reference values for N = 3 from two independent high-accuracy integrations
// of the profile ODE (adaptive 8th-order runs at rtol 1e-13 started from two
// different regularization offsets, agreeing to ~1e-12).
constexpr double kM3 = 1.1652290696;
constexpr double kA3 = 63.1350020482;

struct PointValue {
  double x;
  double u;
};
// U_1 samples from the same reference integrations.
constexpr PointValue kU1Samples[] = {
    {0.25, 0.180059176694}, {0.5, 0.303846242637}, {1.0, 0.476802295453},
    {2.0, 0.684324625542},  {4.0, 0.889201215448}, {10.0, 1.083304231505},
    {30.0, 1.161874780967}, {60.0, 1.165228972996},
};

boost::math::interpolators::pchip<std::vector<double>> interpolant(const Profile& p) {
  auto xs = p.grid.nodes;
  auto ys = p.values;
  return {std::move(xs), std::move(ys)};
}

}  // namespace

TEST_CASE("shooting route reproduces the N=3 reference constants") {
  Parameters p(3);
  auto sol = solve_Pa(1.0, p, kA3 + 2.0, 1e-8);
  CHECK(sol.a == 1.0);
  CHECK(sol.solver_tag == SolverTag::picard_rk);
  CHECK(std::abs(sol.max_value - kM3) < 1e-6);
  CHECK(std::abs(sol.flat_point - kA3) < 1e-6);
}

TEST_CASE("integral-equation route reproduces the N=3 reference constants") {
  Parameters p(3);
  auto sol = integral_equation_solve(p, kA3 + 2.0, 1e-8);
  CHECK(sol.solver_tag == SolverTag::integral_equation);
  CHECK(std::abs(sol.max_value - kM3) < 1e-6);
  CHECK(std::abs(sol.flat_point - kA3) < 1e-6);
}

TEST_CASE("U_1 pointwise values match the reference integration") {
  Parameters p(3);
  auto sol = solve_Pa(1.0, p, 70.0, 1e-8);
  auto sp = interpolant(sol.profile);
  for (const auto& s : kU1Samples) {
    const double v = (s.x >= sol.flat_point) ? sol.max_value : sp(s.x);
    CHECK(std::abs(v - s.u) < 5e-7);
  }
}

TEST_CASE("certified critical constants agree across routes") {
  Parameters p(3);
  auto cc = critical_constants(p, 1e-8);
  CHECK(cc.N == 3);
  CHECK(std::abs(cc.M - kM3) < 1e-6);
  CHECK(std::abs(cc.A - kA3) < 1e-6);
  CHECK(cc.tol < 1e-6);
  CHECK(cc.tol > 0.0);
  // cell-mass critical value N^N * V_N * M
  const double vn = unit_ball_volume(3);
  CHECK(cc.M_bar == doctest::Approx(27.0 * vn * cc.M).epsilon(1e-12));
  // bound M in (0, 2]
  CHECK(cc.M > 0.0);
  CHECK(cc.M <= 2.0);
}

TEST_CASE("profiles satisfy the a-priori bounds and concavity") {
  Parameters p(3);
  for (double a : {0.7, 1.0, 5.0}) {
    auto sol = solve_Pa(a, p, 80.0 / a, 1e-8);
    auto du = derivative_samples(sol.profile);
    double prev = du[0];
    CHECK(du[0] == doctest::Approx(a).epsilon(1e-10));
    for (int i = 0; i < sol.profile.grid.n_nodes(); ++i) {
      const double x = sol.profile.grid.nodes[i];
      const double u = sol.profile.values[i];
      CHECK(u >= 0.0);
      CHECK(u <= 2.0);               // global bound on the profile
      CHECK(du[i] >= -1e-9);         // nondecreasing
      CHECK(du[i] <= a + 1e-6);      // slope bounded by the initial slope
      CHECK(prev - du[i] >= -1e-6);  // derivative nonincreasing (concavity)
      CHECK(x * du[i] <= u + 1e-6);  // concave through the origin
      prev = du[i];
    }
    CHECK(std::abs(sol.max_value - kM3) < 1e-5);  // max is a-independent
  }
}

TEST_CASE("scaling relation U_a(x) = U_1(a x)") {
  Parameters p(3);
  const double a = 2.5;
  auto base = solve_Pa(1.0, p, 4.0, 1e-8);
  auto scaled = solve_Pa(a, p, 4.0 / a, 1e-8);
  auto sp = interpolant(base.profile);
  auto sq = interpolant(scaled.profile);
  for (double x : {0.1, 0.37, 0.8, 1.2, 1.55}) {
    CHECK(std::abs(sq(x) - sp(a * x)) < 1e-7);
  }
}

TEST_CASE("flat point outside the window leaves the +inf sentinel") {
  Parameters p(3);
  auto sol = solve_Pa(1.0, p, 30.0, 1e-8);
  CHECK(std::isinf(sol.flat_point));
  CHECK(sol.max_value < kM3);
  CHECK(sol.max_value > 1.16);  // already close at x = 30
}

TEST_CASE("mass classification follows the trichotomy") {
  Parameters p(3);
  auto low = find_a_for_mass(0.3 * kM3, p, 1e-8);
  REQUIRE(low.kind == MassClassification::Kind::unique);
  CHECK_FALSE(low.tolerance_band);
  // round trip: the returned slope reproduces the requested boundary mass
  auto sol = solve_Pa(low.a, p, 1.0, 1e-8);
  CHECK(std::abs(sol.profile.values.back() - 0.3 * kM3) < 1e-7);

  auto crit = find_a_for_mass(kM3, p, 1e-8);
  REQUIRE(crit.kind == MassClassification::Kind::continuum);
  CHECK(crit.tolerance_band);
  CHECK(std::abs(crit.a - kA3) < 1e-5);  // continuum starts at the flat slope

  auto none = find_a_for_mass(1.01 * kM3, p, 1e-8);
  CHECK(none.kind == MassClassification::Kind::none);
}

TEST_CASE("picard local solution matches the full solver near the origin") {
  Parameters p(3);
  auto local = picard_local(1.0, p, 0.02, 1e-10);
  auto full = solve_Pa(1.0, p, 1.0, 1e-8);
  auto sp = interpolant(full.profile);
  for (int i = 1; i < local.grid.n_nodes(); ++i) {
    const double x = local.grid.nodes[i];
    CHECK(std::abs(local.values[i] - sp(x)) < 1e-8);
  }
  // leading behavior u ~ x near zero
  CHECK(local.derivative_at_zero == doctest::Approx(1.0));
  CHECK(local.values.back() < 0.02);
  CHECK(local.values.back() > 0.9 * 0.02 * (1.0 - 0.05));
}

TEST_CASE("solvers are deterministic") {
  Parameters p(3);
  auto a1 = solve_Pa(2.0, p, 2.0, 1e-6);
  auto a2 = solve_Pa(2.0, p, 2.0, 1e-6);
  CHECK(a1.profile.values == a2.profile.values);
  CHECK(a1.flat_point == a2.flat_point);
}

TEST_CASE("N=4 constants are finite and below the N=3 ones") {
  Parameters p4(4);
  auto cc4 = critical_constants(p4, 1e-6);
  CHECK(cc4.M > 0.0);
  CHECK(cc4.M <= 2.0);
  CHECK(cc4.A > 0.0);
  CHECK(std::isfinite(cc4.A));
}

TEST_CASE("stationary solver input validation") {
  Parameters p(3);
  CHECK_THROWS_AS(solve_Pa(-1.0, p, 1.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(solve_Pa(1.0, p, 0.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(solve_Pa(1.0, p, 1.0, 0.0), invalid_input);
  CHECK_THROWS_AS(integral_equation_solve(p, -1.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(find_a_for_mass(-0.5, p, 1e-8), invalid_input);
  CHECK_THROWS_AS(Parameters(2), invalid_input);
  CHECK(grid_cells_for_tol(1e-6) > 0);
}
