#pragma once

#include <vector>

namespace kscrit::quad {

// Cumulative integrals I_j = int_0^{x_j} phi(s) * s^w ds for w > -1, with phi
// piecewise linear through nodal samples (phi(0) finite). The power weight is
// integrated in closed form per cell, so integrable singularities like s^{q-1}
// near 0 cost no accuracy.
std::vector<double> cumulative_power_weight(const std::vector<double>& x,
                                            const std::vector<double>& phi,
                                            double w);

// Cumulative trapezoid: T_j = int_0^{x_j} f ds with f piecewise linear.
std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& f);

// Plain trapezoid over the whole grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& f);

// Solves a tridiagonal system in place (Thomas algorithm).
// lower[0] and upper[n-1] are ignored. diag and rhs are overwritten.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs);

}  // namespace kscrit::quad
