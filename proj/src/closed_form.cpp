#include <cmath>

#include "compacta/dynamics.hpp"
#include "compacta/errors.hpp"

namespace compacta {

std::string_view to_string(PhaseTag phase) {
  switch (phase) {
    case PhaseTag::Settling: return "settling";
    case PhaseTag::PostSettling: return "post-settling";
    case PhaseTag::HomogenizedSettling: return "homogenized-settling";
    case PhaseTag::HomogenizedPost: return "homogenized-post";
  }
  return "unknown";
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Overdamped: return "overdamped";
    case Mode::Oscillatory: return "oscillatory";
    case Mode::Critical: return "critical";
  }
  return "unknown";
}

Mode classify_mode(double alpha0, double beta0, double critical_band) {
  const double disc = alpha0 * alpha0 - 4.0 * beta0;
  if (std::abs(disc) <= critical_band * alpha0 * alpha0) return Mode::Critical;
  return disc > 0.0 ? Mode::Overdamped : Mode::Oscillatory;
}

namespace {

ClosedFormSolution make_solution(PhaseTag phase, int order, double damping, double stiffness,
                                 double forcing_const, double forcing_slope, double offset,
                                 double q_init, double q_dot_init, double critical_band) {
  if (stiffness == 0.0) throw SingularError("beta0 vanishes; the particular solution is undefined");
  if (order == 1 && damping == 0.0) throw SingularError("alpha0 vanishes in the first-order model");

  ClosedFormSolution s;
  s.phase = phase;
  s.order = order;
  s.damping = damping;
  s.stiffness = stiffness;
  s.forcing_const = forcing_const;
  s.forcing_slope = forcing_slope;
  s.offset = offset;
  // Same expression for both orders: damping * ps + stiffness * (pc + ps t) = F(t).
  s.particular_slope = forcing_slope / stiffness;
  s.particular_const = (forcing_const - damping * s.particular_slope) / stiffness;

  const double y0 = q_init - (s.particular_const + s.particular_slope * offset);
  const double v0 = q_dot_init - s.particular_slope;

  if (order == 1) {
    const double r = -stiffness / damping;
    s.mode = Mode::Overdamped;
    s.root_fast = s.root_slow = r;
    s.c1 = y0;
    return s;
  }

  s.mode = classify_mode(damping, stiffness, critical_band);
  const double disc = damping * damping - 4.0 * stiffness;
  switch (s.mode) {
    case Mode::Overdamped: {
      const double rf = -0.5 * (damping + std::sqrt(disc));
      // Product of the roots is beta0; avoids cancellation in (-a + sqrt(disc)) / 2.
      const double rs = stiffness / rf;
      s.root_fast = rf;
      s.root_slow = rs;
      s.c2 = (v0 - rf * y0) / (rs - rf);
      s.c1 = y0 - s.c2;
      break;
    }
    case Mode::Oscillatory: {
      const double sigma = -0.5 * damping;
      const double omega = 0.5 * std::sqrt(-disc);
      s.root_fast = {sigma, -omega};
      s.root_slow = {sigma, omega};
      s.c1 = y0;
      s.c2 = (v0 - sigma * y0) / omega;
      break;
    }
    case Mode::Critical: {
      const double r = -0.5 * damping;
      s.root_fast = s.root_slow = r;
      s.c1 = y0;
      s.c2 = v0 - r * y0;
      break;
    }
  }
  return s;
}

}  // namespace

Kinematics ClosedFormSolution::evaluate(double t) const {
  const double tau = t - offset;
  Kinematics k;
  if (order == 1) {
    const double r = root_slow.real();
    const double h = c1 * std::exp(r * tau);
    k = {h, r * h, r * r * h};
  } else {
    switch (mode) {
      case Mode::Overdamped: {
        const double rf = root_fast.real();
        const double rs = root_slow.real();
        const double ef = c1 * std::exp(rf * tau);
        const double es = c2 * std::exp(rs * tau);
        k = {ef + es, rf * ef + rs * es, rf * rf * ef + rs * rs * es};
        break;
      }
      case Mode::Oscillatory: {
        const double sigma = root_slow.real();
        const double omega = root_slow.imag();
        const double e = std::exp(sigma * tau);
        const double cs = std::cos(omega * tau);
        const double sn = std::sin(omega * tau);
        const double u = c1 * cs + c2 * sn;
        const double du = omega * (-c1 * sn + c2 * cs);
        k = {e * u, e * (sigma * u + du), e * ((sigma * sigma - omega * omega) * u + 2.0 * sigma * du)};
        break;
      }
      case Mode::Critical: {
        const double r = root_slow.real();
        const double e = std::exp(r * tau);
        const double a = c1 + c2 * tau;
        k = {a * e, (c2 + r * a) * e, (2.0 * r * c2 + r * r * a) * e};
        break;
      }
    }
  }
  k.q += particular_const + particular_slope * t;
  k.q_dot += particular_slope;
  return k;
}

double ClosedFormSolution::residual(double t) const {
  const Kinematics k = evaluate(t);
  if (order == 1) return damping * k.q_dot + stiffness * k.q - forcing(t);
  return k.q_ddot + damping * k.q_dot + stiffness * k.q - forcing(t);
}

Kinematics Response::evaluate(double t) const { return t <= t0 ? settling.evaluate(t) : post.evaluate(t); }

ClosedFormSolution phase1_closed_form(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                                      double critical_band) {
  scenario.validate();
  const double eta = scenario.eta;
  const double t0 = scenario.t0;
  return make_solution(PhaseTag::Settling, 2, rc.alpha0, rc.beta0, -eta * rc.gamma1 / t0,
                       -eta * rc.gamma0 / t0, 0.0, 0.0, 0.0, critical_band);
}

ClosedFormSolution phase2_closed_form(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                                      double q0_at_t0, double q0_dot_at_t0, double critical_band) {
  scenario.validate();
  return make_solution(PhaseTag::PostSettling, 2, rc.alpha0, rc.beta0, -scenario.eta * rc.gamma0, 0.0,
                       scenario.t0, q0_at_t0, q0_dot_at_t0, critical_band);
}

Response full_response(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                       double critical_band) {
  Response r;
  r.t0 = scenario.t0;
  r.settling = phase1_closed_form(rc, scenario, critical_band);
  const Kinematics end = r.settling.evaluate(scenario.t0);
  r.post = phase2_closed_form(rc, scenario, end.q, end.q_dot, critical_band);
  return r;
}

Response homogenized_solutions(const HomogenizedCoefficients& hc, const SettlingScenario& scenario) {
  scenario.validate();
  if (hc.alpha0 == 0.0) throw SingularError("alpha0 vanishes; the homogenized equation degenerates");
  const double eta = scenario.eta;
  const double t0 = scenario.t0;
  Response r;
  r.t0 = t0;
  r.settling = make_solution(PhaseTag::HomogenizedSettling, 1, hc.alpha0, hc.beta0, -eta * hc.gamma1 / t0,
                             -eta * hc.gamma0 / t0, 0.0, 0.0, 0.0, 0.0);
  const double q_end = r.settling.evaluate(t0).q;
  r.post = make_solution(PhaseTag::HomogenizedPost, 1, hc.alpha0, hc.beta0, -eta * hc.gamma0, 0.0, t0,
                         q_end, 0.0, 0.0);
  return r;
}

}  // namespace compacta
