#include <doctest.h>

#include <cmath>
#include <vector>

#include "kscrit/errors.hpp"
#include "kscrit/grid.hpp"
#include "kscrit/quadrature.hpp"

using namespace kscrit;

TEST_CASE("power-weight cumulative integral is exact for linear integrands") {
  // int_0^x (c0 + c1 s) s^w ds = c0 x^{w+1}/(w+1) + c1 x^{w+2}/(w+2), and the
  // per-cell closed form reproduces it to roundoff even with w = q-2 in (-2,-1)
  // excluded; here w > -1 as required.
  Grid g = Grid::graded(2.0, 3.0, 50);
  const double c0 = 2.0, c1 = 3.0, w = -1.0 / 3.0;
  std::vector<double> phi(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) phi[i] = c0 + c1 * g.nodes[i];
  auto I = quad::cumulative_power_weight(g.nodes, phi, w);
  REQUIRE(I.size() == phi.size());
  CHECK(I[0] == 0.0);
  for (int i = 1; i < g.n_nodes(); ++i) {
    const double x = g.nodes[i];
    const double exact =
        c0 * std::pow(x, w + 1.0) / (w + 1.0) + c1 * std::pow(x, w + 2.0) / (w + 2.0);
    CHECK(I[i] == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("power-weight integral converges at second order for smooth integrands") {
  // phi = s^2 against weight s^{-1/2}: int_0^1 s^{3/2} ds = 2/5.
  const double w = -0.5;
  auto error_at = [&](int n) {
    Grid g = Grid::uniform(1.0, n);
    std::vector<double> phi(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) phi[i] = g.nodes[i] * g.nodes[i];
    auto I = quad::cumulative_power_weight(g.nodes, phi, w);
    return std::abs(I.back() - 2.0 / 5.0);
  };
  const double e1 = error_at(64), e2 = error_at(128);
  CHECK(e1 / e2 > 3.5);  // ~4 for O(h^2)
  CHECK(e2 < 5e-5);
}

TEST_CASE("cumulative trapezoid and trapezoid agree and are exact on linears") {
  Grid g = Grid::graded(1.0, 2.0, 17);
  std::vector<double> f(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) f[i] = 1.0 + 4.0 * g.nodes[i];
  auto F = quad::cumulative_trapezoid(g.nodes, f);
  for (int i = 0; i < g.n_nodes(); ++i) {
    const double x = g.nodes[i];
    CHECK(F[i] == doctest::Approx(x + 2.0 * x * x).epsilon(1e-14));
  }
  CHECK(quad::trapezoid(g.nodes, f) == doctest::Approx(F.back()).epsilon(1e-15));
}

TEST_CASE("tridiagonal solver reproduces a dense reference solution") {
  // System with diagonal dominance; verify A x = b by direct substitution.
  std::vector<double> lower = {0.0, -1.0, -2.0, -0.5};
  std::vector<double> diag = {4.0, 5.0, 6.0, 3.0};
  std::vector<double> upper = {-1.0, -2.0, -1.0, 0.0};
  std::vector<double> rhs = {1.0, 2.0, 3.0, 4.0};
  auto d = diag;
  auto x = rhs;
  quad::solve_tridiagonal(lower, d, upper, x);
  std::vector<double> back(4);
  back[0] = diag[0] * x[0] + upper[0] * x[1];
  for (int i = 1; i < 4; ++i) {
    back[i] = lower[i] * x[i - 1] + diag[i] * x[i];
    if (i < 3) back[i] += upper[i] * x[i + 1];
  }
  for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
}

TEST_CASE("quadrature input validation") {
  std::vector<double> x = {0.0, 1.0};
  std::vector<double> f = {1.0};
  CHECK_THROWS_AS(quad::cumulative_power_weight(x, f, 0.0), invalid_input);
  CHECK_THROWS_AS(quad::cumulative_power_weight(x, {1.0, 1.0}, -1.0), invalid_input);
  CHECK_THROWS_AS(quad::cumulative_trapezoid(x, f), invalid_input);
  std::vector<double> a = {0.0, 1.0}, b = {1.0, 1.0};
  CHECK_THROWS_AS(quad::solve_tridiagonal(a, b, b, f), invalid_input);
}
