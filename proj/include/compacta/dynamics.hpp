#pragma once

// Settling and post-settling response of the transverse micro-descriptor Q0.
//
// During settling (0 <= t <= t0) the axial macro-strain ramps linearly,
// d1 U1 = -eta t / t0, and is frozen at -eta afterwards. The closed forms
// below take their integration constants from the initial conditions
// Q0(0) = Q0'(0) = 0 and from continuity at t0; nothing is transcribed from
// tabulated constants.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include "compacta/coefficients.hpp"
#include "compacta/ode_oracle.hpp"

namespace compacta {

struct SettlingScenario {
  double eta = 0.01;   // settling measure (total settlement / L1)
  double t0 = 10.0;    // s, end of settling
  double t_f = 50.0;   // s, end of the simulated window
  double L1 = 1000.0;  // m
  double L2 = 1000.0;  // m
  double L3 = 1000.0;  // m

  // Throws ValidationError on eta <= 0, t0 <= 0, t_f <= t0 or L_i <= 0.
  // eta = 0 is accepted when allow_zero_settlement is set (quiescent runs).
  void validate(bool allow_zero_settlement = true) const;
  double settlement() const { return eta * L1; }
  // l / min(L_i); scale separation is expected to keep this at or below 0.1.
  double scale_ratio(double length_scale) const;

  double strain(double t) const;
  // Rate of the axial strain. At t = t0 the settling branch (left limit) is
  // returned when `settling_branch` is set.
  double strain_rate(double t, bool settling_branch) const;
};

// Axial macro-displacement U1(x1, t) = -eta x1 min(t, t0) / t0.
double settling_macro_displacement(double x1, double t, const SettlingScenario& scenario);

enum class PhaseTag { Settling, PostSettling, HomogenizedSettling, HomogenizedPost };
enum class Mode { Overdamped, Oscillatory, Critical };

std::string_view to_string(PhaseTag phase);
std::string_view to_string(Mode mode);

// Critical when |alpha0^2 - 4 beta0| <= band * alpha0^2.
Mode classify_mode(double alpha0, double beta0, double critical_band);

struct Kinematics {
  double q = 0.0;
  double q_dot = 0.0;
  double q_ddot = 0.0;
};

// Solution of one phase:
//   order 2:  q'' + damping q' + stiffness q = F(t)
//   order 1:  damping q' + stiffness q = F(t)
// with F(t) = forcing_const + forcing_slope t. The particular part is
// particular_const + particular_slope t; the homogeneous part is written in
// tau = t - offset using the real basis of the mode:
//   overdamped   c1 e^{r_fast tau} + c2 e^{r_slow tau}
//   oscillatory  e^{sigma tau} (c1 cos(omega tau) + c2 sin(omega tau))
//   critical     (c1 + c2 tau) e^{r tau}
//   order 1      c1 e^{r tau}
struct ClosedFormSolution {
  PhaseTag phase = PhaseTag::Settling;
  Mode mode = Mode::Overdamped;
  int order = 2;
  double damping = 0.0;
  double stiffness = 0.0;
  double forcing_const = 0.0;
  double forcing_slope = 0.0;
  std::complex<double> root_fast;  // (-alpha0 - sqrt(disc)) / 2
  std::complex<double> root_slow;  // (-alpha0 + sqrt(disc)) / 2
  double particular_const = 0.0;
  double particular_slope = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double offset = 0.0;

  Kinematics evaluate(double t) const;
  double residual(double t) const;
  double forcing(double t) const { return forcing_const + forcing_slope * t; }
};

// Settling phase from rest. Throws SingularError when beta0 = 0.
ClosedFormSolution phase1_closed_form(const ReducedCoefficients& rc,
                                      const SettlingScenario& scenario,
                                      double critical_band = 1e-9);

// Post-settling phase starting from (Q0, Q0') at t0.
ClosedFormSolution phase2_closed_form(const ReducedCoefficients& rc,
                                      const SettlingScenario& scenario, double q0_at_t0,
                                      double q0_dot_at_t0, double critical_band = 1e-9);

// Both phases, joined continuously at t0.
struct Response {
  ClosedFormSolution settling;
  ClosedFormSolution post;
  double t0 = 0.0;

  // t <= t0 evaluates the settling branch.
  Kinematics evaluate(double t) const;
  double limit() const { return post.particular_const; }
};

Response full_response(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                       double critical_band = 1e-9);

// First-order (l -> 0) model; only the value of Q0 is continuous at t0.
// Throws SingularError when alpha0 = 0.
Response homogenized_solutions(const HomogenizedCoefficients& hc,
                               const SettlingScenario& scenario);

struct RegimeReport {
  double discriminant = 0.0;  // 1/s^2
  Mode mode = Mode::Overdamped;
  CriticalLength critical_length;
  double decay_time = 0.0;  // 1 / |Re(r_slow)|
  double period = 0.0;      // 2 pi / Im(r); zero unless oscillatory
};

RegimeReport classify_regime(const ReducedCoefficients& rc, const CubicSpec& spec,
                             const MaterialParams& materials, double critical_band = 1e-9);

// Slowest decay rate |Re(r_slow)| of the second-order phase.
double slow_decay_rate(const ReducedCoefficients& rc, double critical_band = 1e-9);

// Q1 from the incompressibility constraint; the forcing is frozen at its
// t0 value after settling ends.
double recover_q1(double q0, double t, const MacroCoefficients& mc,
                  const SettlingScenario& scenario);

enum class PressureMode { Full, Homogenized };

struct PressureRecovery {
  double from_axial = 0.0;       // from the axial micro balance
  double from_transverse = 0.0;  // from the transverse micro balance
  double mismatch = 0.0;
  bool consistent = true;  // mismatch <= 1e-8 max(|P|, 1 Pa)
};

// Homogenized mode drops the micro-inertia terms.
PressureRecovery recover_pressure(const MicroState& state, const MacroCoefficients& mc,
                                  PressureMode mode = PressureMode::Full);

// Micro state at time t for a given Q0 history point.
MicroState state_at(double t, const Kinematics& k, const MacroCoefficients& mc,
                    const SettlingScenario& scenario, bool settling_branch);

enum class Provenance { ClosedForm, Integrator };

struct Trajectory {
  std::vector<double> t;
  std::vector<double> q0;
  std::vector<double> q0_dot;
  std::vector<double> q1;
  std::vector<double> pressure;
  std::vector<PhaseTag> phase;
  Provenance provenance = Provenance::ClosedForm;
  double max_pressure_mismatch = 0.0;
};

// Samples the response at `count` evenly spaced times on [0, t_f].
Trajectory sample_response(const Response& response, const MacroCoefficients& mc,
                           const SettlingScenario& scenario, std::size_t count,
                           PressureMode mode = PressureMode::Full);

// Builds a trajectory from integrator samples. Q0'' is read off the equation.
Trajectory trajectory_from_oracle(const OracleTrajectory& oracle, const ReducedCoefficients& rc,
                                  const MacroCoefficients& mc, const SettlingScenario& scenario,
                                  PressureMode mode = PressureMode::Full);

// max |e1 Q1 + (e2 + e3) Q0 - phi_F eta min(t, t0) / t0| over the samples.
double max_constraint_residual(const Trajectory& traj, const MacroCoefficients& mc,
                               const SettlingScenario& scenario);

// Reference problems for the integrator oracle. The initial step resolves
// the fastest rate of the equation.
LinearOdeProblem settling_problem(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                                  std::size_t samples = 2000);
LinearOdeProblem homogenized_problem(const HomogenizedCoefficients& hc,
                                     const SettlingScenario& scenario, std::size_t samples = 2000);

// max |closed form - integrator| / max |closed form| over the oracle samples.
double oracle_relative_gap(const Response& response, const OracleTrajectory& oracle);

// Sign changes of values[i] - reference for samples with t_from <= t <= t_to.
// Deviations below 1e-9 of the largest one in the window are ignored.
int count_sign_changes(const std::vector<double>& t, const std::vector<double>& values,
                       double reference, double t_from, double t_to = HUGE_VAL);

}  // namespace compacta
