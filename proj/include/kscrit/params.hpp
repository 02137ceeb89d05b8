#pragma once

#include <cmath>

#include "kscrit/errors.hpp"

namespace kscrit {

// Problem parameters: space dimension N >= 3, critical exponent q = 2/N,
// normalized boundary mass m >= 0.
struct Parameters {
  int N = 3;
  double q = 2.0 / 3.0;
  double m = 0.0;

  Parameters() = default;
  Parameters(int N_in, double m_in = 0.0) : N(N_in), q(2.0 / N_in), m(m_in) {
    if (N < 3) throw invalid_input("Parameters: N must be >= 3");
    if (m < 0.0) throw invalid_input("Parameters: m must be >= 0");
  }
};

// Volume of the unit ball in dimension N.
inline double unit_ball_volume(int N) {
  return std::pow(3.14159265358979323846, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

}  // namespace kscrit
