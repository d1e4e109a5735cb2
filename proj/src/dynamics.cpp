#include "compacta/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "compacta/errors.hpp"

namespace compacta {

void SettlingScenario::validate(bool allow_zero_settlement) const {
  if (!std::isfinite(eta) || eta < 0.0 || (eta == 0.0 && !allow_zero_settlement)) {
    throw ValidationError("must be positive", "scenario.eta");
  }
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw ValidationError("must be positive", "scenario.t0");
  if (!(t_f > t0) || !std::isfinite(t_f)) throw ValidationError("must exceed t0", "scenario.t_f");
  if (!(L1 > 0.0)) throw ValidationError("must be positive", "scenario.L1");
  if (!(L2 > 0.0)) throw ValidationError("must be positive", "scenario.L2");
  if (!(L3 > 0.0)) throw ValidationError("must be positive", "scenario.L3");
}

double SettlingScenario::scale_ratio(double length_scale) const {
  return length_scale / std::min({L1, L2, L3});
}

double SettlingScenario::strain(double t) const { return -eta * std::min(t, t0) / t0; }

double SettlingScenario::strain_rate(double t, bool settling_branch) const {
  if (t < t0 || (t == t0 && settling_branch)) return -eta / t0;
  return 0.0;
}

double settling_macro_displacement(double x1, double t, const SettlingScenario& scenario) {
  return x1 * scenario.strain(t);
}

double slow_decay_rate(const ReducedCoefficients& rc, double critical_band) {
  if (classify_mode(rc.alpha0, rc.beta0, critical_band) == Mode::Overdamped) {
    return 2.0 * rc.beta0 / (rc.alpha0 + std::sqrt(rc.discriminant()));
  }
  return 0.5 * rc.alpha0;
}

RegimeReport classify_regime(const ReducedCoefficients& rc, const CubicSpec& spec,
                             const MaterialParams& materials, double critical_band) {
  RegimeReport r;
  r.discriminant = rc.discriminant();
  r.mode = classify_mode(rc.alpha0, rc.beta0, critical_band);
  r.critical_length = critical_length(materials, spec.g, spec.h, rc.backend);
  r.decay_time = 1.0 / slow_decay_rate(rc, critical_band);
  if (r.mode == Mode::Oscillatory) {
    r.period = 2.0 * std::numbers::pi / (0.5 * std::sqrt(-r.discriminant));
  }
  return r;
}

double recover_q1(double q0, double t, const MacroCoefficients& mc, const SettlingScenario& scenario) {
  if (mc.e[0] == 0.0) throw SingularError("e1 vanishes; Q1 cannot be recovered");
  return (-mc.fluid_fraction * scenario.strain(t) - (mc.e[1] + mc.e[2]) * q0) / mc.e[0];
}

PressureRecovery recover_pressure(const MicroState& state, const MacroCoefficients& mc, PressureMode mode) {
  if (mc.e[0] == 0.0 || mc.e[1] == 0.0) throw SingularError("pressure link factor vanishes");
  const double inertia = mode == PressureMode::Full ? 1.0 : 0.0;
  PressureRecovery p;
  p.from_axial = -(inertia * mc.m[0] * state.q1_ddot + axial_internal_force(mc, state)) / mc.e[0];
  p.from_transverse = -(inertia * mc.m[1] * state.q0_ddot + transverse_internal_force(mc, state)) / mc.e[1];
  p.mismatch = std::abs(p.from_axial - p.from_transverse);
  p.consistent = p.mismatch <= 1e-8 * std::max(std::abs(p.from_axial), 1.0);
  return p;
}

MicroState state_at(double t, const Kinematics& k, const MacroCoefficients& mc,
                    const SettlingScenario& scenario, bool settling_branch) {
  return complete_state(mc, k.q, k.q_dot, k.q_ddot, scenario.strain(t),
                        scenario.strain_rate(t, settling_branch));
}

namespace {

void push_sample(Trajectory& traj, double t, const Kinematics& k, PhaseTag phase, bool settling_branch,
                 const MacroCoefficients& mc, const SettlingScenario& scenario, PressureMode mode) {
  const MicroState s = state_at(t, k, mc, scenario, settling_branch);
  const PressureRecovery p = recover_pressure(s, mc, mode);
  traj.t.push_back(t);
  traj.q0.push_back(k.q);
  traj.q0_dot.push_back(k.q_dot);
  traj.q1.push_back(s.q1);
  traj.pressure.push_back(p.from_axial);
  traj.phase.push_back(phase);
  traj.max_pressure_mismatch = std::max(traj.max_pressure_mismatch, p.mismatch);
}

}  // namespace

Trajectory sample_response(const Response& response, const MacroCoefficients& mc,
                           const SettlingScenario& scenario, std::size_t count, PressureMode mode) {
  if (count < 2) throw ValidationError("at least two samples are required", "numerics.sample_count");
  Trajectory traj;
  traj.provenance = Provenance::ClosedForm;
  const double span = scenario.t_f;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = i + 1 == count ? span : span * static_cast<double>(i) / static_cast<double>(count - 1);
    const bool settling = t <= response.t0;
    const ClosedFormSolution& branch = settling ? response.settling : response.post;
    push_sample(traj, t, branch.evaluate(t), branch.phase, settling, mc, scenario, mode);
  }
  return traj;
}

Trajectory trajectory_from_oracle(const OracleTrajectory& oracle, const ReducedCoefficients& rc,
                                  const MacroCoefficients& mc, const SettlingScenario& scenario,
                                  PressureMode mode) {
  Trajectory traj;
  traj.provenance = Provenance::Integrator;
  const double eta = scenario.eta;
  for (std::size_t i = 0; i < oracle.t.size(); ++i) {
    const double t = oracle.t[i];
    const bool settling = t <= scenario.t0;
    const double forcing = settling ? -eta * (rc.gamma0 * t + rc.gamma1) / scenario.t0 : -eta * rc.gamma0;
    Kinematics k{oracle.q[i], oracle.q_dot[i], 0.0};
    k.q_ddot = forcing - rc.alpha0 * k.q_dot - rc.beta0 * k.q;
    const PhaseTag phase = mode == PressureMode::Full
                               ? (settling ? PhaseTag::Settling : PhaseTag::PostSettling)
                               : (settling ? PhaseTag::HomogenizedSettling : PhaseTag::HomogenizedPost);
    push_sample(traj, t, k, phase, settling, mc, scenario, mode);
  }
  return traj;
}

double max_constraint_residual(const Trajectory& traj, const MacroCoefficients& mc,
                               const SettlingScenario& scenario) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double rhs = -mc.fluid_fraction * scenario.strain(traj.t[i]);
    const double r = mc.e[0] * traj.q1[i] + (mc.e[1] + mc.e[2]) * traj.q0[i] - rhs;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

namespace {

LinearOdeProblem problem_for(int order, double damping, double stiffness, double gamma0, double gamma1,
                             double fastest_rate, const SettlingScenario& scenario, std::size_t samples) {
  scenario.validate();
  if (samples < 2) throw ValidationError("at least two samples are required", "numerics.sample_count");
  LinearOdeProblem p;
  p.order = order;
  p.damping = damping;
  p.stiffness = stiffness;
  p.forcing.breakpoint = scenario.t0;
  p.forcing.before_const = -scenario.eta * gamma1 / scenario.t0;
  p.forcing.before_slope = -scenario.eta * gamma0 / scenario.t0;
  p.forcing.after_const = -scenario.eta * gamma0;
  p.t_start = 0.0;
  p.t_end = scenario.t_f;
  const double spacing = scenario.t_f / static_cast<double>(samples - 1);
  const double wanted = 0.2 / fastest_rate;
  p.record_every = std::max(1, static_cast<int>(std::ceil(spacing / wanted)));
  p.dt = spacing / p.record_every;
  return p;
}

}  // namespace

LinearOdeProblem settling_problem(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                                  std::size_t samples) {
  const double rate = std::max(std::abs(rc.alpha0), std::sqrt(std::abs(rc.beta0)));
  return problem_for(2, rc.alpha0, rc.beta0, rc.gamma0, rc.gamma1, rate, scenario, samples);
}

LinearOdeProblem homogenized_problem(const HomogenizedCoefficients& hc, const SettlingScenario& scenario,
                                     std::size_t samples) {
  if (hc.alpha0 == 0.0) throw SingularError("alpha0 vanishes; the homogenized equation degenerates");
  return problem_for(1, hc.alpha0, hc.beta0, hc.gamma0, hc.gamma1, std::abs(hc.relaxation_rate()), scenario,
                     samples);
}

double oracle_relative_gap(const Response& response, const OracleTrajectory& oracle) {
  double gap = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < oracle.t.size(); ++i) {
    const double cf = response.evaluate(oracle.t[i]).q;
    gap = std::max(gap, std::abs(cf - oracle.q[i]));
    scale = std::max(scale, std::abs(cf));
  }
  if (gap == 0.0) return 0.0;
  return scale > 0.0 ? gap / scale : HUGE_VAL;
}

int count_sign_changes(const std::vector<double>& t, const std::vector<double>& values, double reference,
                       double t_from, double t_to) {
  double scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_from && t[i] <= t_to) scale = std::max(scale, std::abs(values[i] - reference));
  }
  // Samples within round-off of the reference carry no sign.
  const double deadband = 1e-9 * scale;
  int changes = 0;
  int last = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_from || t[i] > t_to) continue;
    const double d = values[i] - reference;
    if (std::abs(d) <= deadband) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (last != 0 && sign != last) ++changes;
    last = sign;
  }
  return changes;
}

}  // namespace compacta
