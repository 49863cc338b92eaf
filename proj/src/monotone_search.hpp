#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

namespace sudas::detail {

// Smallest x >= 0 with f(x) <= target for nonincreasing f. Bracket expansion by
// factors of 4, then Illinois regula falsi in log(x) with periodic bisection.
// The second member is false when expansion gave up. Shrinking stops below
// `x_floor`; the search stops once the log-bracket is narrower than `log_tol`.
template <class F>
std::pair<double, bool> smallest_feasible(F&& f, double target, double guess,
                                          std::size_t max_steps, double f_tol,
                                          double log_tol = 1e-15, double x_floor = 0.0) {
  const double f0 = f(0.0);
  if (f0 <= target) return {0.0, true};
  double hi = (guess > 0.0 && std::isfinite(guess)) ? guess : 1.0;
  double f_hi = f(hi);
  double lo = 0.0;
  double f_lo = f0;
  std::size_t steps = 0;
  while (!(f_hi <= target)) {
    if (++steps > max_steps) return {hi, false};
    lo = hi;
    f_lo = f_hi;
    hi *= 4.0;
    f_hi = f(hi);
  }
  if (lo == 0.0) {
    for (steps = 0; steps < max_steps; ++steps) {
      const double y = 0.25 * hi;
      if (y < x_floor) break;
      const double fy = f(y);
      if (fy <= target) {
        hi = y;
        f_hi = fy;
      } else {
        lo = y;
        f_lo = fy;
        break;
      }
    }
    if (lo == 0.0) return {hi, true};
  }

  double tl = std::log(lo), th = std::log(hi);
  double gl = f_lo - target, gh = f_hi - target;
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    if (th - tl <= log_tol * std::max(1.0, std::abs(th))) break;
    if (-(f_hi - target) <= f_tol) break;
    double t;
    if (it % 4 == 3 || !std::isfinite(gl) || !std::isfinite(gh) || gl == gh) {
      t = 0.5 * (tl + th);
    } else {
      t = (tl * gh - th * gl) / (gh - gl);
      if (!(t > tl && t < th)) t = 0.5 * (tl + th);
    }
    const double ft = f(std::exp(t));
    if (ft <= target) {
      th = t;
      f_hi = ft;
      gh = ft - target;
      if (side == 1) gl *= 0.5;
      side = 1;
    } else {
      tl = t;
      gl = ft - target;
      if (side == -1) gh *= 0.5;
      side = -1;
    }
  }
  return {std::exp(th), true};
}

}  // namespace sudas::detail
