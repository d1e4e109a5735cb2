#include "compacta/audit.hpp"

#include <cmath>
#include <tuple>

#include "compacta/errors.hpp"

namespace compacta {

using cplx = std::complex<double>;

std::pair<cplx, cplx> exponential_constants(const ClosedFormSolution& s) {
  if (s.order == 1) return {0.0, s.c1};
  switch (s.mode) {
    case Mode::Overdamped:
      return {s.c1, s.c2};
    case Mode::Oscillatory:
      // cos and sin split over e^{-i omega tau} (fast) and e^{+i omega tau} (slow).
      return {cplx(s.c1, s.c2) * 0.5, cplx(s.c1, -s.c2) * 0.5};
    case Mode::Critical:
      break;
  }
  throw RegimeUndefined("repeated root: no two-exponential representation");
}

ConstantsAudit audit_constants(const ReducedCoefficients& rc, const SettlingScenario& scenario,
                               double critical_band) {
  scenario.validate();
  const Mode mode = classify_mode(rc.alpha0, rc.beta0, critical_band);
  if (mode == Mode::Critical) {
    throw RegimeUndefined("critical regime: the tabulated constants divide by sqrt(alpha0^2 - 4 beta0) = 0");
  }
  const double a = rc.alpha0;
  const double b = rc.beta0;
  const double g0 = rc.gamma0;
  const double g1 = rc.gamma1;
  const double eta = scenario.eta;
  const double t0 = scenario.t0;
  const cplx sd = std::sqrt(cplx(rc.discriminant(), 0.0));
  const cplx rf = 0.5 * (-a - sd);
  const cplx rs = 0.5 * (-a + sd);
  const double k = g0 * a - b * g1;

  ConstantsAudit out;
  out.mode = mode;
  out.tabulated_a1 = eta * (a * a * g0 - 2.0 * b * g0 - a * b * g1 - sd * k) / (2.0 * b * b * t0 * sd);
  out.tabulated_a2 = eta * (-2.0 * b * g0 + (a + sd) * k) / (2.0 * b * b * t0 * sd);
  const double m = a * g0 / b - g1;
  out.tabulated_b1 = 2.0 * g0 - m * (-a + sd);
  out.tabulated_b2 = -2.0 * g0 + m * (-a - sd);
  out.tabulated_a3 = eta * (a * g0 / (b * b * t0) - g1 / (b * t0));

  auto settling_q = [&](double t) {
    return -(eta / (b * t0)) * (g0 * (t - a / b) + g1) + out.tabulated_a1 * std::exp(rf * t) +
           out.tabulated_a2 * std::exp(rs * t);
  };
  auto settling_q_dot = [&](double t) {
    return -eta * g0 / (b * t0) + out.tabulated_a1 * rf * std::exp(rf * t) + out.tabulated_a2 * rs * std::exp(rs * t);
  };
  const cplx scale = eta / (2.0 * b * t0 * sd);
  auto post_q = [&](double t) {
    const double tau = t - t0;
    return -eta * g0 / b + scale * (out.tabulated_b1 * std::exp(rf * tau) + out.tabulated_b2 * std::exp(rs * tau)) +
           out.tabulated_a1 * std::exp(rf * t) + out.tabulated_a2 * std::exp(rs * t);
  };
  auto post_q_dot = [&](double t) {
    const double tau = t - t0;
    return scale * (out.tabulated_b1 * rf * std::exp(rf * tau) + out.tabulated_b2 * rs * std::exp(rs * tau)) +
           out.tabulated_a1 * rf * std::exp(rf * t) + out.tabulated_a2 * rs * std::exp(rs * t);
  };

  const Response full = full_response(rc, scenario, critical_band);
  const Kinematics end = full.settling.evaluate(t0);
  out.tabulated_q0_at_zero = std::abs(settling_q(0.0));
  out.tabulated_q0_dot_at_zero = std::abs(settling_q_dot(0.0));
  out.tabulated_value_jump = std::abs(post_q(t0) - end.q);
  out.tabulated_rate_jump = std::abs(post_q_dot(t0) - end.q_dot);

  std::tie(out.derived_a1, out.derived_a2) = exponential_constants(full.settling);
  std::tie(out.derived_b1, out.derived_b2) = exponential_constants(full.post);
  const Kinematics start = full.settling.evaluate(0.0);
  const Kinematics after = full.post.evaluate(t0);
  out.derived_q0_at_zero = std::abs(start.q);
  out.derived_q0_dot_at_zero = std::abs(start.q_dot);
  out.derived_value_jump = std::abs(after.q - end.q);
  out.derived_rate_jump = std::abs(after.q_dot - end.q_dot);

  const HomogenizedCoefficients hc = homogenized_from(rc);
  const double rate = hc.relaxation_rate();
  out.tabulated_a3_q0_at_zero = std::abs(-eta * (g0 / b) * (0.0 / t0) + out.tabulated_a3 * (1.0 - std::exp(-rate * 0.0)));
  const Response hom = homogenized_solutions(hc, scenario);
  const double hom_end = hom.settling.evaluate(t0).q;
  const double tabulated_post_t0 = -eta * g0 / b + out.tabulated_a3 * (std::exp(-rate * t0) - 1.0) * std::exp(-rate * t0);
  out.tabulated_homogenized_value_jump = std::abs(tabulated_post_t0 - hom_end);
  out.derived_a3 = hom.settling.particular_const;
  out.derived_a3_q0_at_zero = std::abs(hom.settling.evaluate(0.0).q);
  out.derived_homogenized_value_jump = std::abs(hom.post.evaluate(t0).q - hom_end);
  return out;
}

}  // namespace compacta
