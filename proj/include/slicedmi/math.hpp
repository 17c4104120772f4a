#pragma once

#include <cmath>
#include <vector>

#include "slicedmi/errors.hpp"

namespace slicedmi::detail {

// Digamma for x > 0: recurrence up to x >= 10, then the asymptotic series
// log x - 1/2x - 1/12x^2 + 1/120x^4 - 1/252x^6 + 1/240x^8 - 1/132x^10.
// The first dropped term is 691/(32760 x^12) < 3e-14 at the cutoff, so
// absolute error stays well below 1e-12 everywhere.
inline double digamma(double x) {
  if (!(x > 0.0)) throw input_error("digamma: argument must be positive");
  double value = 0.0;
  while (x < 10.0) {
    value -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  value += std::log(x) - 0.5 * inv;
  value -= inv2 * (1.0 / 12.0 -
                   inv2 * (1.0 / 120.0 -
                           inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return value;
}

// log of the volume of the d-dimensional Euclidean unit ball,
// pi^{d/2} / Gamma(d/2 + 1). d=1 gives log 2, d=2 gives log pi.
inline double log_unit_ball_volume(int d) {
  if (d < 1) throw input_error("log_unit_ball_volume: d must be >= 1");
  return 0.5 * d * std::log(3.14159265358979323846) - std::lgamma(0.5 * d + 1.0);
}

// log(sum_i exp(v_i)) with max subtraction.
inline double logsumexp(const std::vector<double>& v) {
  if (v.empty()) throw input_error("logsumexp: empty input");
  double m = v[0];
  for (double x : v)
    if (x > m) m = x;
  if (!std::isfinite(m)) return m;  // all -inf, or a stray inf/nan propagates
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace slicedmi::detail
