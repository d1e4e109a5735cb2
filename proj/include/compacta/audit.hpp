#pragma once

// Audit of the tabulated integration constants of the settling solutions.
//
// The tabulated A1, A2 (settling), B1, B2 (post-settling) and A3
// (homogenized settling) are evaluated verbatim, in complex arithmetic so the
// oscillatory regime is covered, and the solutions rebuilt from them are
// checked against their own initial and continuity conditions. The engine
// never uses these constants; this is a diagnostic only.

#include <complex>
#include <utility>

#include "compacta/dynamics.hpp"

namespace compacta {

struct ConstantsAudit {
  Mode mode = Mode::Overdamped;

  // Tabulated constants.
  std::complex<double> tabulated_a1, tabulated_a2;
  std::complex<double> tabulated_b1, tabulated_b2;
  double tabulated_a3 = 0.0;

  // Constants re-derived from the initial and continuity conditions, in the
  // complex exponential basis {e^{r_fast tau}, e^{r_slow tau}}.
  std::complex<double> derived_a1, derived_a2;
  std::complex<double> derived_b1, derived_b2;  // tau = t - t0
  double derived_a3 = 0.0;

  // Defects of the tabulated forms.
  double tabulated_q0_at_zero = 0.0;      // |Q0(0)|, settling
  double tabulated_q0_dot_at_zero = 0.0;  // |Q0'(0)|, settling
  double tabulated_value_jump = 0.0;      // |Q0(t0+) - Q0(t0-)|, against the derived settling state
  double tabulated_rate_jump = 0.0;
  double tabulated_a3_q0_at_zero = 0.0;             // homogenized settling at t = 0
  double tabulated_homogenized_value_jump = 0.0;    // homogenized post-settling form at t0

  // Same defects for the derived constants.
  double derived_q0_at_zero = 0.0;
  double derived_q0_dot_at_zero = 0.0;
  double derived_value_jump = 0.0;
  double derived_rate_jump = 0.0;
  double derived_a3_q0_at_zero = 0.0;
  double derived_homogenized_value_jump = 0.0;
};

// Throws RegimeUndefined in the critical band: the tabulated forms divide by
// sqrt(alpha0^2 - 4 beta0).
ConstantsAudit audit_constants(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                               double critical_band = 1e-9);

// Coefficients (k_fast, k_slow) of e^{r_fast tau} and e^{r_slow tau} that
// represent a second-order solution's homogeneous part.
std::pair<std::complex<double>, std::complex<double>> exponential_constants(const ClosedFormSolution& s);

}  // namespace compacta
