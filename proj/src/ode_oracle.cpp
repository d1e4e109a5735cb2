#include "compacta/ode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compacta/errors.hpp"

namespace compacta {

namespace {

struct Segment {
  double start;
  double end;
  bool after_breakpoint;
};

struct RunResult {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> v;
  std::size_t breakpoint_index = 0;
  double max_step = 0.0;
};

std::vector<Segment> segments_of(const LinearOdeProblem& p) {
  const double b = p.forcing.breakpoint;
  if (b > p.t_start && b < p.t_end) return {{p.t_start, b, false}, {b, p.t_end, true}};
  return {{p.t_start, p.t_end, b <= p.t_start}};
}

RunResult run(const LinearOdeProblem& p, double dt, int record_every) {
  RunResult out;
  double q = p.initial[0];
  double v = p.order == 2 ? p.initial[1] : 0.0;
  const double a = p.damping;
  const double k = p.stiffness;

  const std::vector<Segment> segs = segments_of(p);
  if (p.order == 1) {
    const double f0 = segs.front().after_breakpoint ? p.forcing.after(p.t_start) : p.forcing.before(p.t_start);
    v = (f0 - k * q) / a;
  }
  out.t.push_back(p.t_start);
  out.q.push_back(q);
  out.v.push_back(v);

  for (const Segment& seg : segs) {
    const double len = seg.end - seg.start;
    const auto blocks = static_cast<long long>(std::ceil(len / (dt * record_every) - 1e-9));
    const long long steps = std::max<long long>(blocks, 1) * record_every;
    const double h = len / static_cast<double>(steps);
    out.max_step = std::max(out.max_step, h);
    auto force = [&](double t) { return seg.after_breakpoint ? p.forcing.after(t) : p.forcing.before(t); };

    for (long long n = 0; n < steps; ++n) {
      const double t = seg.start + static_cast<double>(n) * h;
      if (p.order == 2) {
        auto acc = [&](double tt, double qq, double vv) { return force(tt) - a * vv - k * qq; };
        const double k1q = v;
        const double k1v = acc(t, q, v);
        const double k2q = v + 0.5 * h * k1v;
        const double k2v = acc(t + 0.5 * h, q + 0.5 * h * k1q, v + 0.5 * h * k1v);
        const double k3q = v + 0.5 * h * k2v;
        const double k3v = acc(t + 0.5 * h, q + 0.5 * h * k2q, v + 0.5 * h * k2v);
        const double k4q = v + h * k3v;
        const double k4v = acc(t + h, q + h * k3q, v + h * k3v);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      } else {
        auto rate = [&](double tt, double qq) { return (force(tt) - k * qq) / a; };
        const double k1 = rate(t, q);
        const double k2 = rate(t + 0.5 * h, q + 0.5 * h * k1);
        const double k3 = rate(t + 0.5 * h, q + 0.5 * h * k2);
        const double k4 = rate(t + h, q + h * k3);
        q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (!std::isfinite(q) || !std::isfinite(v)) {
        const double bad = t + h;
        throw DivergenceError("integrator produced a non-finite state at t = " + std::to_string(bad), bad);
      }
      if ((n + 1) % record_every == 0) {
        const double tn = (n + 1 == steps) ? seg.end : t + h;
        out.t.push_back(tn);
        out.q.push_back(q);
        // For order 1 the rate is read off the equation at the sample.
        out.v.push_back(p.order == 2 ? v : (force(tn) - k * q) / a);
      }
    }
    if (!seg.after_breakpoint && segs.size() == 2) out.breakpoint_index = out.t.size() - 1;
  }
  return out;
}

}  // namespace

void LinearOdeProblem::validate() const {
  if (order != 1 && order != 2) throw ValidationError("order must be 1 or 2", "order");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("step must be positive", "dt");
  if (!(t_end > t_start)) throw ValidationError("time span is empty", "t_end");
  if (record_every < 1) throw ValidationError("must be at least 1", "record_every");
  if (order == 1 && damping == 0.0) throw SingularError("first-order problem with zero damping");
}

OracleTrajectory integrate(const LinearOdeProblem& problem) {
  problem.validate();
  const RunResult coarse = run(problem, problem.dt, problem.record_every);
  const RunResult fine = run(problem, 0.5 * problem.dt, 2 * problem.record_every);

  OracleTrajectory out;
  out.t = fine.t;
  out.q = fine.q;
  out.q_dot = fine.v;
  out.breakpoint_index = fine.breakpoint_index;
  out.step = fine.max_step;
  double scale = 0.0;
  for (std::size_t i = 0; i < fine.q.size(); ++i) {
    out.error_estimate = std::max(out.error_estimate, std::abs(fine.q[i] - coarse.q[i]));
    scale = std::max(scale, std::abs(fine.q[i]));
  }
  if (out.error_estimate == 0.0) {
    out.relative_error = 0.0;
  } else {
    out.relative_error = scale > 0.0 ? out.error_estimate / scale : HUGE_VAL;
  }
  return out;
}

OracleTrajectory halve_until_converged(LinearOdeProblem problem, double target) {
  if (!(target >= 1e-12)) throw ValidationError("target must be at least 1e-12", "target");
  constexpr int kMaxHalvings = 20;
  double previous = HUGE_VAL;
  int stalls = 0;
  for (int halving = 0;; ++halving) {
    OracleTrajectory result = integrate(problem);
    result.halvings = halving;
    if (result.relative_error <= target) return result;
    // Round-off floor: the gap has stopped shrinking.
    stalls = (halving >= 4 && result.relative_error > 0.5 * previous) ? stalls + 1 : 0;
    if (halving == kMaxHalvings || stalls >= 2) {
      throw ToleranceNotMet("integrator did not reach relative tolerance " + std::to_string(target) +
                                " (achieved " + std::to_string(result.relative_error) + ")",
                            result.relative_error);
    }
    previous = result.relative_error;
    problem.dt *= 0.5;
    problem.record_every *= 2;
  }
}

}  // namespace compacta
