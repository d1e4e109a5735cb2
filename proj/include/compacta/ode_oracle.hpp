#pragma once

// Fixed-step classical RK4 integration of the scalar linear equations
//
//   order 2:  q'' + damping q' + stiffness q = F(t)
//   order 1:  damping q' + stiffness q = F(t)
//
// with F piecewise affine and a single breakpoint. Used as the brute-force
// reference for every closed-form solution; it never looks at roots or
// integration constants.

#include <array>
#include <cstddef>
#include <vector>

namespace compacta {

// F(t) = before_const + before_slope t  on [t_start, breakpoint]
//      = after_const + after_slope t    on [breakpoint, t_end]
struct PiecewiseAffineForcing {
  double breakpoint = 0.0;
  double before_const = 0.0;
  double before_slope = 0.0;
  double after_const = 0.0;
  double after_slope = 0.0;

  double before(double t) const { return before_const + before_slope * t; }
  double after(double t) const { return after_const + after_slope * t; }
};

struct LinearOdeProblem {
  int order = 2;
  double damping = 0.0;
  double stiffness = 0.0;
  PiecewiseAffineForcing forcing;
  std::array<double, 2> initial{0.0, 0.0};  // q, q' (q' ignored for order 1)
  double t_start = 0.0;
  double t_end = 1.0;
  // Requested step. Each segment's step is shrunk so that the segment holds
  // an integral number of steps, a multiple of record_every.
  double dt = 1e-3;
  int record_every = 1;

  void validate() const;
};

struct OracleTrajectory {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> q_dot;
  std::size_t breakpoint_index = 0;  // sample index of the breakpoint (0 if none)
  double step = 0.0;                 // largest step actually used (fine run)
  double error_estimate = 0.0;       // max |q_dt - q_dt/2| over the samples
  double relative_error = 0.0;       // error_estimate / max |q|
  int halvings = 0;
};

// Runs the problem at dt and dt/2 and returns the finer run. Sample times are
// identical in both runs, so the Richardson gap is taken pointwise.
// Throws DivergenceError at the first non-finite state.
OracleTrajectory integrate(const LinearOdeProblem& problem);

// Halves dt until the relative Richardson gap is at most target. Gives up
// with ToleranceNotMet after 20 halvings or once the gap stops shrinking.
OracleTrajectory halve_until_converged(LinearOdeProblem problem, double target);

}  // namespace compacta
