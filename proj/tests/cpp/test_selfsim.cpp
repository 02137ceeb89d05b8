#include <doctest.h>

#include <cmath>
#include <vector>

// boost 1.74 pchip calls isnan unqualified; make the std overloads visible.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "kscrit/errors.hpp"
#include "kscrit/params.hpp"
#include "kscrit/profile.hpp"
#include "kscrit/selfsim.hpp"
#include "kscrit/stationary.hpp"

using namespace kscrit;

namespace {

constexpr double kM3 = 1.1652290696;
constexpr double kA3 = 63.1350020482;

// Reference flat points / plateaus for N = 3 from independent high-accuracy
// integrations of the perturbed ODE (same oracle setup as the stationary ones).
struct LadderRow {
  double eps;
  double A_eps;
  double M_eps;
};
constexpr LadderRow kLadder[] = {
    {0.01, 66.1810304517, 1.1943600478},
    {0.02, 69.6103294967, 1.2250612279},
    {0.05, 83.2528875293, 1.3284276463},
    {0.10, 137.2448267756, 1.5585631006},
};

}  // namespace

TEST_CASE("perturbed profiles reproduce the reference ladder") {
  Parameters p(3);
  for (const auto& row : kLadder) {
    auto V = solve_Qeps(row.eps, p, row.A_eps + 2.0, 1e-8);
    CHECK(V.eps == row.eps);
    CHECK(std::abs(V.A_eps - row.A_eps) < 1e-5);
    CHECK(std::abs(V.M_eps - row.M_eps) < 1e-7);
    CHECK(V.concave);
    CHECK(V.K_eps == doctest::Approx(1.0).epsilon(1e-9));
    // strict super-critical plateau
    CHECK(V.M_eps > kM3);
    CHECK(V.A_eps > kA3);
  }
}

TEST_CASE("ladder is monotone in eps") {
  for (int i = 1; i < 4; ++i) {
    CHECK(kLadder[i].A_eps > kLadder[i - 1].A_eps);
    CHECK(kLadder[i].M_eps > kLadder[i - 1].M_eps);
  }
}

TEST_CASE("profile derivative at x=1 matches the closed-form fixed point") {
  // Independent reference: V'(1) for eps = 0.5 from the high-accuracy oracle.
  Parameters p(3);
  auto V = solve_Qeps(0.5, p, 2.0, 1e-8);
  auto xs = V.profile.grid.nodes;
  auto ys = V.profile.values;
  boost::math::interpolators::pchip<std::vector<double>> sp(std::move(xs), std::move(ys));
  CHECK(std::abs(sp.prime(1.0) - 0.5369317866) < 1e-5);
}

TEST_CASE("amplitude law closed form and blow-up time") {
  auto law = AmplitudeLaw::make(10.0, 0.05, 2.0 / 3.0);
  CHECK(law.T_star == doctest::Approx(1.0 / (0.05 * std::pow(10.0, 2.0 / 3.0) * (2.0 / 3.0)))
                          .epsilon(1e-14));
  CHECK(amplitude(law, 0.0) == doctest::Approx(10.0).epsilon(1e-14));
  // halfway to blow-up: a = a0 * (1/2)^{-1/q} = a0 * 2^{3/2}
  CHECK(amplitude(law, 0.5 * law.T_star) ==
        doctest::Approx(10.0 * std::pow(2.0, 1.5)).epsilon(1e-12));
  // the law satisfies da/dt = eps a^{1+q} (central difference check)
  const double t = 0.3 * law.T_star, h = 1e-6;
  const double lhs = (amplitude(law, t + h) - amplitude(law, t - h)) / (2.0 * h);
  const double rhs = 0.05 * std::pow(amplitude(law, t), 1.0 + 2.0 / 3.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
  CHECK_THROWS_AS(amplitude(law, law.T_star), numerical_failure);
  CHECK_THROWS_AS(amplitude(law, -0.1), invalid_input);
  CHECK_THROWS_AS(AmplitudeLaw::make(0.0, 0.05, 2.0 / 3.0), invalid_input);
}

TEST_CASE("self-similar field sampling tracks the amplitude") {
  Parameters p(3);
  auto V = solve_Qeps(0.01, p, 67.5, 1e-8);
  auto law = AmplitudeLaw::make(V.A_eps, 0.01, p.q);
  Grid g = Grid::graded(1.0, 3.0, 512);
  // at t = 0 the field is V(a0 x): boundary value is the plateau M_eps since
  // a0 = A_eps, and nmax equals the initial amplitude
  Profile u0 = self_similar_field(V, law, 0.0, g);
  CHECK(u0.values.back() == doctest::Approx(V.M_eps).epsilon(1e-9));
  CHECK(nmax(u0) == doctest::Approx(law.a0).epsilon(1e-3));
  // later the amplitude has grown and nmax follows it
  const double t = 0.5 * law.T_star;
  Profile ut = self_similar_field(V, law, t, g);
  CHECK(nmax(ut) == doctest::Approx(amplitude(law, t)).epsilon(1e-3));
  for (int i = 1; i < g.n_nodes(); ++i) CHECK(ut.values[i] >= u0.values[i] - 1e-12);
}

TEST_CASE("critical band rows carry flat points and concavity certificates") {
  Parameters p(3);
  auto rows = critical_band(p, {0.05, 0.1}, 1e-6);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.flat_detected);
    CHECK(r.concave);
    CHECK(r.plateau > kM3);
    // the band value V_eps(A+1) sits between the critical plateau and M_eps
    CHECK(r.M_eps > kM3);
    CHECK(r.M_eps <= r.plateau + 1e-12);
  }
  CHECK(rows[0].plateau < rows[1].plateau);
}

TEST_CASE("self-similar solver input validation") {
  Parameters p(3);
  CHECK_THROWS_AS(solve_Qeps(0.0, p, 1.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(solve_Qeps(1.5, p, 1.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(solve_Qeps(0.1, p, -1.0, 1e-8), invalid_input);
  CHECK_THROWS_AS(critical_band(p, {}, 1e-6), invalid_input);
  auto V = solve_Qeps(0.1, p, 1.0, 1e-6);
  auto law = AmplitudeLaw::make(1.0, 0.05, p.q);  // eps mismatch
  CHECK_THROWS_AS(self_similar_field(V, law, 0.0, Grid::uniform(1.0, 8)), invalid_input);
}
