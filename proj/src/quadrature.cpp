#include "kscrit/quadrature.hpp"

#include <cmath>
#include <cstddef>

#include "kscrit/errors.hpp"

namespace kscrit::quad {

std::vector<double> cumulative_power_weight(const std::vector<double>& x,
                                            const std::vector<double>& phi, double w) {
  if (x.size() != phi.size() || x.size() < 2)
    throw invalid_input("cumulative_power_weight: bad sizes");
  if (w <= -1.0) throw invalid_input("cumulative_power_weight: weight must be > -1");
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  const double e0 = w + 1.0, e1 = w + 2.0;
  double pa0 = 0.0, pa1 = 0.0;  // a^{w+1}, a^{w+2} carried across cells
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = x[j], b = x[j + 1];
    const double pb0 = std::pow(b, e0), pb1 = std::pow(b, e1);
    const double m0 = (pb0 - pa0) / e0;
    const double m1 = (pb1 - pa1) / e1;
    const double slope = (phi[j + 1] - phi[j]) / (b - a);
    out[j + 1] = out[j] + (phi[j] - slope * a) * m0 + slope * m1;
    pa0 = pb0;
    pa1 = pb1;
  }
  return out;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& f) {
  if (x.size() != f.size() || x.size() < 2)
    throw invalid_input("cumulative_trapezoid: bad sizes");
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 0; j + 1 < x.size(); ++j) {
    out[j + 1] = out[j] + 0.5 * (f[j] + f[j + 1]) * (x[j + 1] - x[j]);
  }
  return out;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j)
    s += 0.5 * (f[j] + f[j + 1]) * (x[j + 1] - x[j]);
  return s;
}

void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  if (lower.size() != n || diag.size() != n || upper.size() != n || n == 0)
    throw invalid_input("solve_tridiagonal: bad sizes");
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

}  // namespace kscrit::quad
