#include "compacta/limit_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "compacta/audit.hpp"
#include "compacta/errors.hpp"

namespace compacta {

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Log-spaced points resolve the boundary layer at t = 0; the uniform ones
// cover the rest of the settling phase.
std::vector<double> gap_grid(double fast_rate, double t0) {
  std::vector<double> t{0.0};
  const double first = 1e-3 / fast_rate;
  const int log_points = 400;
  for (int i = 0; i <= log_points; ++i) {
    const double tt = first * std::pow(t0 / first, static_cast<double>(i) / log_points);
    if (tt < t0) t.push_back(tt);
  }
  const int uniform = 1000;
  for (int i = 1; i <= uniform; ++i) t.push_back(t0 * i / uniform);
  return t;
}

}  // namespace

LimitReport asymptotic_limit_report(const MaterialParams& materials, double g, double h,
                                    const SettlingScenario& scenario,
                                    const std::vector<double>& l0_sequence, Backend backend,
                                    double critical_band) {
  scenario.validate();
  if (l0_sequence.size() < 3) {
    throw ValidationError("at least three values are needed to fit an order", "limit.l0_sequence");
  }
  for (std::size_t i = 0; i < l0_sequence.size(); ++i) {
    if (!(l0_sequence[i] > 0.0) || !std::isfinite(l0_sequence[i])) {
      throw ValidationError("values must be positive", "limit.l0_sequence");
    }
    if (i > 0 && !(l0_sequence[i] < l0_sequence[i - 1])) {
      throw ValidationError("values must be strictly decreasing", "limit.l0_sequence");
    }
  }

  LimitReport report;
  const double t0 = scenario.t0;
  std::vector<double> l0s, root_gaps, sup_gaps, constant_gaps;
  for (double l0 : l0_sequence) {
    const CubicSpec spec{l0, g, h};
    const ReducedCoefficients rc = reduced_coefficients(spec, materials, backend);
    if (classify_mode(rc.alpha0, rc.beta0, critical_band) != Mode::Overdamped) {
      std::ostringstream msg;
      msg << "l0 = " << l0 << " is not in the overdamped regime";
      throw ValidationError(msg.str(), "limit.l0_sequence");
    }
    const HomogenizedCoefficients hc = homogenized_from(rc);
    const Response full = full_response(rc, scenario, critical_band);
    const Response hom = homogenized_solutions(hc, scenario);

    LimitRow row;
    row.l0 = l0;
    row.fast_root = full.settling.root_fast.real();
    row.slow_root = full.settling.root_slow.real();
    report.homogenized_root = -hc.relaxation_rate();
    row.root_gap = std::abs(row.slow_root - report.homogenized_root);
    row.fast_root_scaled = row.fast_root * l0 * l0;

    for (double t : gap_grid(std::abs(row.fast_root), t0)) {
      row.supnorm_gap = std::max(row.supnorm_gap, std::abs(full.settling.evaluate(t).q - hom.settling.evaluate(t).q));
    }
    const auto [a1, a2] = exponential_constants(full.settling);
    const double a3 = hom.settling.particular_const;
    row.slow_constant_gap = a3 != 0.0 ? std::abs(a2.real() + a3) / std::abs(a3) : std::abs(a2.real());
    for (int i = 0; i <= 200; ++i) {
      const double t = t0 * (0.1 + 0.9 * i / 200.0);
      row.fast_branch_sup = std::max(row.fast_branch_sup, std::abs(a1.real() * std::exp(row.fast_root * t)));
    }

    report.rows.push_back(row);
    l0s.push_back(l0);
    root_gaps.push_back(row.root_gap);
    sup_gaps.push_back(row.supnorm_gap);
    constant_gaps.push_back(row.slow_constant_gap);
  }

  report.root_gap_order = fitted_order(l0s, root_gaps);
  report.supnorm_gap_order = fitted_order(l0s, sup_gaps);
  report.slow_constant_gap_order = fitted_order(l0s, constant_gaps);
  const double ref = report.rows.back().fast_root_scaled;
  report.slow_constant_gap_monotone = true;
  report.fast_branch_monotone = true;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    report.fast_root_scaling_spread =
        std::max(report.fast_root_scaling_spread, std::abs(report.rows[i].fast_root_scaled / ref - 1.0));
    if (i > 0) {
      report.slow_constant_gap_monotone &= report.rows[i].slow_constant_gap < report.rows[i - 1].slow_constant_gap;
      report.fast_branch_monotone &= report.rows[i].fast_branch_sup <= report.rows[i - 1].fast_branch_sup;
    }
  }
  return report;
}

}  // namespace compacta
