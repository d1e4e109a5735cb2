#include "compacta/cell_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "compacta/errors.hpp"

namespace compacta {

namespace {

void check_axis(int axis) {
  if (axis < 0 || axis > 2) {
    throw std::invalid_argument("axis index must be 0, 1 or 2, got " + std::to_string(axis));
  }
}

// Three-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 3> kGaussNodes{-0.77459666924148337704, 0.0,
                                            0.77459666924148337704};
constexpr std::array<double, 3> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double integrate_box(const Integrand& f, const Vec3& lo, const Vec3& hi) {
  Vec3 half;
  Vec3 mid;
  for (int i = 0; i < 3; ++i) {
    half[i] = 0.5 * (hi[i] - lo[i]);
    mid[i] = 0.5 * (hi[i] + lo[i]);
  }
  double sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        const Vec3 p{mid[0] + half[0] * kGaussNodes[a], mid[1] + half[1] * kGaussNodes[b],
                     mid[2] + half[2] * kGaussNodes[c]};
        sum += kGaussWeights[a] * kGaussWeights[b] * kGaussWeights[c] * f(p);
      }
    }
  }
  return sum * half[0] * half[1] * half[2];
}

// Mean of v^p along a linear segment running from a to b.
double segment_power_mean(double a, double b, int p) {
  double sum = 0.0;
  for (int k = 0; k <= p; ++k) {
    sum += std::pow(a, k) * std::pow(b, p - k);
  }
  return sum / (p + 1);
}

}  // namespace

void MaterialParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError("must be a positive finite number", name);
    }
  };
  positive(rho_s, "rho_s");
  positive(rho_f, "rho_f");
  positive(mu_s, "mu_s");
  positive(visc_s, "mu_tilde_s");
  positive(visc_f, "mu_tilde_f");
  if (!(lambda_s >= 0.0) || !std::isfinite(lambda_s)) {
    throw ValidationError("must be a non-negative finite number", "lambda_s");
  }
  for (double b : body_force) {
    if (!std::isfinite(b)) throw ValidationError("must be finite", "body_force");
  }
}

bool MaterialParams::has_body_force() const {
  return std::any_of(body_force.begin(), body_force.end(), [](double b) { return b != 0.0; });
}

CellGeometry::CellGeometry(Vec3 edges, Vec3 splits) : edges_(edges), splits_(splits) {
  for (int i = 0; i < 3; ++i) {
    if (!(edges_[i] > 0.0) || !std::isfinite(edges_[i])) {
      throw ValidationError("cell edge must be positive", "l" + std::to_string(i + 1));
    }
    if (!(splits_[i] > 0.0 && splits_[i] < edges_[i])) {
      throw ValidationError("split must satisfy 0 < g < l", "g" + std::to_string(i + 1));
    }
  }
  length_scale_ = std::sqrt(edges_[0] * edges_[0] + edges_[1] * edges_[1] + edges_[2] * edges_[2]);
}

double CellGeometry::edge(int axis) const {
  check_axis(axis);
  return edges_[axis];
}

double CellGeometry::split(int axis) const {
  check_axis(axis);
  return splits_[axis];
}

bool CellGeometry::is_cubic() const {
  return edges_[0] == edges_[1] && edges_[1] == edges_[2] && splits_[0] == splits_[1] &&
         splits_[1] == splits_[2];
}

double CellGeometry::fluid_fraction() const {
  double phi = 1.0;
  for (int i = 0; i < 3; ++i) phi *= (edges_[i] - splits_[i]) / edges_[i];
  return phi;
}

PhasePartition CellGeometry::partition() const {
  const double phi = fluid_fraction();
  return {splits_, edges_, phi, 1.0 - phi};
}

double CellGeometry::wrap(int axis, double x) const {
  check_axis(axis);
  const double l = edges_[axis];
  double r = std::fmod(x, l);
  if (r < 0.0) r += l;
  if (r >= l) r = 0.0;
  return r;
}

Phase CellGeometry::phase_at(const Vec3& p) const {
  for (int i = 0; i < 3; ++i) {
    const double x = wrap(i, p[i]);
    if (!(x > splits_[i])) return Phase::Solid;
  }
  return Phase::Fluid;
}

ShapeFunctionSet::ShapeFunctionSet(CellGeometry geometry, Vec3 amplitudes)
    : geometry_(std::move(geometry)), amplitudes_(amplitudes) {
  for (int i = 0; i < 3; ++i) {
    if (!(amplitudes_[i] > 0.0) || !std::isfinite(amplitudes_[i])) {
      throw ValidationError("shape amplitude must be positive", "h" + std::to_string(i + 1));
    }
  }
}

double ShapeFunctionSet::amplitude(int axis) const {
  check_axis(axis);
  return amplitudes_[axis];
}

double ShapeFunctionSet::solid_branch_slope(int axis) const {
  check_axis(axis);
  return -2.0 * amplitudes_[axis] / geometry_.split(axis);
}

double ShapeFunctionSet::fluid_branch_slope(int axis) const {
  check_axis(axis);
  return 2.0 * amplitudes_[axis] / (geometry_.edge(axis) - geometry_.split(axis));
}

double ShapeFunctionSet::value(int axis, double x) const {
  check_axis(axis);
  const double h = amplitudes_[axis];
  const double g = geometry_.split(axis);
  const double l = geometry_.edge(axis);
  const double r = geometry_.wrap(axis, x);
  if (r <= g) return h - 2.0 * h * r / g;
  return -h + 2.0 * h * (r - g) / (l - g);
}

double ShapeFunctionSet::gradient(int axis, double x) const {
  check_axis(axis);
  const double r = geometry_.wrap(axis, x);
  return r < geometry_.split(axis) ? solid_branch_slope(axis) : fluid_branch_slope(axis);
}

double cell_average(const CellGeometry& geometry, const Integrand& f, Region region) {
  const Vec3& l = geometry.edges();
  const Vec3& g = geometry.splits();
  double total = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    Vec3 lo;
    Vec3 hi;
    bool fluid_box = true;
    for (int i = 0; i < 3; ++i) {
      const bool upper = (corner >> i) & 1;
      lo[i] = upper ? g[i] : 0.0;
      hi[i] = upper ? l[i] : g[i];
      fluid_box = fluid_box && upper;
    }
    if (region == Region::Fluid && !fluid_box) continue;
    if (region == Region::Solid && fluid_box) continue;
    total += integrate_box(f, lo, hi);
  }
  return total / geometry.volume();
}

double separable_average(const ShapeFunctionSet& shapes, const std::array<AxisFactor, 3>& factors,
                         Region region) {
  const CellGeometry& geom = shapes.geometry();
  double all = 1.0;
  double fluid = 1.0;
  for (int i = 0; i < 3; ++i) {
    const auto [p, q] = factors[i];
    const double h = shapes.amplitude(i);
    const double g = geom.split(i);
    const double l = geom.edge(i);
    const double lower = g * segment_power_mean(h, -h, p) * std::pow(shapes.solid_branch_slope(i), q);
    const double upper =
        (l - g) * segment_power_mean(-h, h, p) * std::pow(shapes.fluid_branch_slope(i), q);
    all *= (lower + upper) / l;
    fluid *= upper / l;
  }
  switch (region) {
    case Region::All: return all;
    case Region::Fluid: return fluid;
    case Region::Solid: return all - fluid;
  }
  return all;
}

ShapeReport validate_shape_properties(const ShapeFunctionSet& shapes) {
  ShapeReport report;
  const CellGeometry& geom = shapes.geometry();
  const double l = geom.length_scale();
  for (int i = 0; i < 3; ++i) {
    auto h_i = [&shapes, i](const Vec3& p) { return shapes.value(i, p[i]); };
    AxisShapeReport& axis = report.axes[i];
    axis.mean_solid = cell_average(geom, h_i, Region::Solid);
    axis.mean_fluid = cell_average(geom, h_i, Region::Fluid);
    // Extremes of a triangle wave sit at its kinks.
    axis.max_value_over_l = shapes.amplitude(i) / l;
    axis.max_gradient = std::max(std::abs(shapes.solid_branch_slope(i)),
                                 std::abs(shapes.fluid_branch_slope(i)));
    const std::string tag = "axis " + std::to_string(i);
    if (std::abs(axis.mean_solid) > 1e-12 * l) {
      report.failures.push_back(tag + ": solid mean of h is not zero");
    }
    if (std::abs(axis.mean_fluid) > 1e-12 * l) {
      report.failures.push_back(tag + ": fluid mean of h is not zero");
    }
    if (axis.max_value_over_l > 1.0) {
      report.failures.push_back(tag + ": amplitude exceeds the length scale l");
    }
  }
  report.passed = report.failures.empty();
  return report;
}

}  // namespace compacta
