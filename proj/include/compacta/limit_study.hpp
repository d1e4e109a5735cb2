#pragma once

// Convergence of the full settling solution to the homogenized one as the
// cell edge l0 shrinks.

#include <cstddef>
#include <vector>

#include "compacta/dynamics.hpp"

namespace compacta {

struct LimitRow {
  double l0 = 0.0;
  double slow_root = 0.0;    // 1/s
  double fast_root = 0.0;    // 1/s
  double root_gap = 0.0;     // |slow_root + beta0/alpha0|
  double supnorm_gap = 0.0;  // sup over [0, t0] of |Q0_full - Q0_homogenized|
  // |A2 + A3| / |A3|: the derived slow constant against minus the
  // homogenized amplitude (the homogeneous part of the homogenized solution
  // is -A3 e^{-(beta0/alpha0) t}).
  double slow_constant_gap = 0.0;
  double fast_branch_sup = 0.0;  // sup over [0.1 t0, t0] of |A1 e^{r_fast t}|
  double fast_root_scaled = 0.0;  // fast_root * l0^2
};

struct LimitReport {
  std::vector<LimitRow> rows;
  double homogenized_root = 0.0;  // -beta0/alpha0
  double root_gap_order = 0.0;
  double supnorm_gap_order = 0.0;
  double slow_constant_gap_order = 0.0;
  // max relative deviation of fast_root * l0^2 from its value at the last l0
  double fast_root_scaling_spread = 0.0;
  bool slow_constant_gap_monotone = false;
  bool fast_branch_monotone = false;
};

// Requires at least three strictly decreasing positive l0 values, all in the
// overdamped regime; throws ValidationError otherwise.
LimitReport asymptotic_limit_report(const MaterialParams& materials, double g, double h,
                                    const SettlingScenario& scenario,
                                    const std::vector<double>& l0_sequence,
                                    Backend backend = Backend::Formula,
                                    double critical_band = 1e-9);

// Least-squares slope of log(y) against log(x); non-positive y are skipped.
// Returns NaN with fewer than two usable points.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace compacta
