#include "compacta/coefficients.hpp"

#include <cmath>
#include <functional>

#include "compacta/errors.hpp"

namespace compacta {

std::string_view to_string(Backend backend) {
  return backend == Backend::Formula ? "paper" : "first-principles";
}

Backend parse_backend(std::string_view name) {
  if (name == "paper") return Backend::Formula;
  if (name == "first-principles") return Backend::FirstPrinciples;
  throw ValidationError("unknown backend '" + std::string(name) +
                            "', expected 'paper' or 'first-principles'",
                        "numerics.backend");
}

void CubicSpec::validate() const {
  if (!(l0 > 0.0) || !std::isfinite(l0)) throw ValidationError("must be positive", "cell.l0");
  if (!(g > 0.0 && g < 1.0)) throw ValidationError("must satisfy 0 < g < 1", "cell.g");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("must be positive", "cell.h");
}

CellGeometry CubicSpec::geometry() const {
  validate();
  return CellGeometry({l0, l0, l0}, {g * l0, g * l0, g * l0});
}

ShapeFunctionSet CubicSpec::shapes() const { return ShapeFunctionSet(geometry(), {h * l0, h * l0, h * l0}); }

namespace {

// Phase-restricted shape moments, by either integration route.
class Moments {
 public:
  Moments(const ShapeFunctionSet& shapes, AveragingRoute route) : shapes_(shapes), route_(route) {}

  // <d_i h^i> over the region
  double grad(int i, Region r) const {
    std::array<AxisFactor, 3> fac{};
    fac[i].gradient_power = 1;
    return average(fac, r);
  }

  // <d_i h^i d_j h^j> over the region
  double grad_product(int i, int j, Region r) const {
    std::array<AxisFactor, 3> fac{};
    fac[i].gradient_power += 1;
    fac[j].gradient_power += 1;
    return average(fac, r);
  }

  // <(h^i)^2> over the region
  double value_squared(int i, Region r) const {
    std::array<AxisFactor, 3> fac{};
    fac[i].value_power = 2;
    return average(fac, r);
  }

 private:
  double average(const std::array<AxisFactor, 3>& fac, Region r) const {
    if (route_ == AveragingRoute::ClosedForm) return separable_average(shapes_, fac, r);
    const ShapeFunctionSet& s = shapes_;
    auto integrand = [&s, fac](const Vec3& p) {
      double v = 1.0;
      for (int k = 0; k < 3; ++k) {
        for (int n = 0; n < fac[k].value_power; ++n) v *= s.value(k, p[k]);
        for (int n = 0; n < fac[k].gradient_power; ++n) v *= s.gradient(k, p[k]);
      }
      return v;
    };
    return cell_average(shapes_.geometry(), integrand, r);
  }

  const ShapeFunctionSet& shapes_;
  AveragingRoute route_;
};

double formula_density_moment(double h, double g, double l, const MaterialParams& mat) {
  return h * h * l * l / 3.0 * (g * g * g * mat.rho_s + std::pow(1.0 - g, 3) * mat.rho_f);
}

}  // namespace

MacroCoefficients macro_coefficients(const ShapeFunctionSet& shapes, const MaterialParams& materials,
                                     Backend backend, AveragingRoute route) {
  materials.validate();
  const CellGeometry& geom = shapes.geometry();
  if (backend == Backend::Formula && !geom.is_cubic()) {
    throw UnsupportedConfiguration(
        "the formula backend is only defined for cubic cells (l1 = l2 = l3, g1 = g2 = g3, h1 = "
        "h2 = h3)");
  }
  const Moments mom(shapes, route);
  const double lam = materials.lambda_s;
  const double mu = materials.mu_s;
  const double vs = materials.visc_s;
  const double vf = materials.visc_f;

  MacroCoefficients mc;
  mc.backend = backend;
  mc.fluid_fraction = geom.fluid_fraction();
  mc.mean_density = materials.rho_s * (1.0 - mc.fluid_fraction) + materials.rho_f * mc.fluid_fraction;

  for (int i = 0; i < 3; ++i) {
    const bool axial = (i == 0);
    const double gs = mom.grad(i, Region::Solid);
    const double gf = mom.grad(i, Region::Fluid);
    mc.e[i] = gf;
    mc.f[i] = (axial ? lam + 2.0 * mu : lam) * gs;
    mc.w[i] = (axial ? 4.0 / 3.0 : -2.0 / 3.0) * (vs * gs + vf * gf);
    mc.m[i] = materials.rho_s * mom.value_squared(i, Region::Solid) +
              materials.rho_f * mom.value_squared(i, Region::Fluid);
    for (int j = 0; j < 3; ++j) {
      const double ps = mom.grad_product(i, j, Region::Solid);
      const double pf = mom.grad_product(i, j, Region::Fluid);
      if (i == j) {
        mc.C[i][j] = (lam + 2.0 * mu) * ps;
        mc.D[i][j] = 4.0 / 3.0 * (vs * ps + vf * pf);
      } else {
        mc.C[i][j] = lam * ps;
        mc.D[i][j] = -2.0 / 3.0 * (vs * ps + vf * pf);
      }
    }
  }

  if (backend == Backend::Formula) {
    const double l0 = geom.edge(0);
    const double g = geom.split(0) / l0;
    const double h = shapes.amplitude(0) / l0;
    for (int i = 0; i < 3; ++i) {
      mc.m[i] = formula_density_moment(h, g, geom.length_scale(), materials);
    }
    // Product form <lambda_S> <d_3 h^3>^S rather than <lambda_S d_3 h^3>^S.
    mc.f[2] = lam * (1.0 - mc.fluid_fraction) * mom.grad(2, Region::Solid);
  }
  return mc;
}

ReducedCoefficients eliminate(const MacroCoefficients& mc) {
  const double e1 = mc.e[0];
  if (e1 == 0.0) {
    throw SingularError("e1 = <d1 h^1>^F vanishes; the constraint cannot be solved for Q1");
  }
  const double kappa = (mc.e[1] + mc.e[2]) / e1;  // Q1 = c - kappa Q0
  const double rho = mc.e[1] / e1;                // weight of the axial balance
  const double phi_over_e1 = mc.fluid_fraction / e1;

  const double inertia = effective_inertia(mc);
  if (inertia == 0.0) throw SingularError("effective inertia of the reduced equation vanishes");

  const double stiffness = (mc.C[1][1] + mc.C[1][2] - kappa * mc.C[1][0]) -
                           rho * (mc.C[0][1] + mc.C[0][2] - kappa * mc.C[0][0]);
  const double damping = (mc.D[1][1] + mc.D[1][2] - kappa * mc.D[1][0]) -
                         rho * (mc.D[0][1] + mc.D[0][2] - kappa * mc.D[0][0]);
  const double strain_load = (mc.f[1] - rho * mc.f[0]) - (mc.C[1][0] - rho * mc.C[0][0]) * phi_over_e1;
  const double rate_load = (mc.w[1] - rho * mc.w[0]) - (mc.D[1][0] - rho * mc.D[0][0]) * phi_over_e1;

  ReducedCoefficients rc;
  rc.backend = Backend::FirstPrinciples;
  rc.alpha0 = damping / inertia;
  rc.beta0 = stiffness / inertia;
  rc.gamma0 = -strain_load / inertia;
  rc.gamma1 = -rate_load / inertia;
  return rc;
}

double effective_inertia(const MacroCoefficients& mc) {
  const double kappa = (mc.e[1] + mc.e[2]) / mc.e[0];
  const double rho = mc.e[1] / mc.e[0];
  return mc.m[1] + rho * kappa * mc.m[0];
}

ReducedCoefficients reduced_coefficients(const CubicSpec& spec, const MaterialParams& materials,
                                         Backend backend) {
  spec.validate();
  materials.validate();
  if (materials.has_body_force()) {
    throw ValidationError("the reduced settling model carries no body force; set it to zero",
                          "materials.body_force");
  }
  if (backend == Backend::FirstPrinciples) {
    return eliminate(macro_coefficients(spec.shapes(), materials, Backend::FirstPrinciples));
  }
  const double g = spec.g;
  const double h = spec.h;
  const double l0sq = spec.l0 * spec.l0;
  const double density = g * g * g * materials.rho_s + std::pow(1.0 - g, 3) * materials.rho_f;

  ReducedCoefficients rc;
  rc.backend = Backend::Formula;
  rc.alpha0 = 24.0 / l0sq * (g * materials.visc_s + (1.0 - g) * materials.visc_f) / density;
  rc.beta0 = 16.0 / l0sq * (g * materials.mu_s) / density;
  rc.gamma0 = -8.0 / (h * l0sq) * (g * g * materials.mu_s) / density;
  rc.gamma1 = 4.0 / (3.0 * h * l0sq) *
              (-g * g * materials.visc_s + (1.0 - g) * (1.0 - g) * materials.visc_f) / density;
  return rc;
}

double HomogenizedCoefficients::settling_amplitude(double eta, double t0) const {
  if (beta0 == 0.0) throw SingularError("beta0 vanishes");
  return eta * (alpha0 * gamma0 / (beta0 * beta0 * t0) - gamma1 / (beta0 * t0));
}

HomogenizedCoefficients homogenized_from(const ReducedCoefficients& rc) {
  if (rc.alpha0 == 0.0) throw SingularError("alpha0 vanishes; the homogenized equation degenerates");
  return {rc.alpha0, rc.beta0, rc.gamma0, rc.gamma1, rc.backend};
}

HomogenizedCoefficients homogenized_coefficients(const CubicSpec& spec,
                                                 const MaterialParams& materials, Backend backend) {
  return homogenized_from(reduced_coefficients(spec, materials, backend));
}

double overdamped_bound_l0_squared(const MaterialParams& materials, double g) {
  const double visc = g * materials.visc_s + (1.0 - g) * materials.visc_f;
  const double density = g * g * g * materials.rho_s + std::pow(1.0 - g, 3) * materials.rho_f;
  return 9.0 * visc * visc / (g * materials.mu_s * density);
}

CriticalLength critical_length(const MaterialParams& materials, double g, double h, Backend backend) {
  CubicSpec base{1.0, g, h};
  base.validate();
  auto disc_at = [&](double l0) {
    return reduced_coefficients(base.with_edge(l0), materials, backend).discriminant();
  };

  // Overdamped (positive) at small l0, oscillatory (negative) at large l0.
  double lo = 1.0;
  double hi = 1.0;
  int expansions = 0;
  if (disc_at(1.0) > 0.0) {
    while (disc_at(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++expansions > 400) throw BracketingError("no sign change of alpha0^2 - 4 beta0 found");
    }
  } else {
    while (disc_at(lo) <= 0.0) {
      hi = lo;
      lo *= 0.5;
      if (++expansions > 400) throw BracketingError("no sign change of alpha0^2 - 4 beta0 found");
    }
  }
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    (disc_at(mid) > 0.0 ? lo : hi) = mid;
  }

  CriticalLength out;
  out.bisection = std::sqrt(lo * hi);
  if (backend == Backend::Formula) {
    out.closed_form = std::sqrt(overdamped_bound_l0_squared(materials, g));
  } else {
    // alpha0 and beta0 both scale as 1/l0^2.
    const ReducedCoefficients unit = reduced_coefficients(base, materials, backend);
    out.closed_form = unit.alpha0 / (2.0 * std::sqrt(unit.beta0));
  }
  if (std::abs(out.bisection - out.closed_form) > 1e-9 * out.closed_form) {
    throw Error("critical length: bisection and closed form disagree");
  }
  return out;
}

MicroState complete_state(const MacroCoefficients& mc, double q0, double q0_dot, double q0_ddot,
                          double strain, double strain_rate) {
  const double e1 = mc.e[0];
  if (e1 == 0.0) throw SingularError("e1 vanishes; Q1 cannot be recovered");
  const double transverse = mc.e[1] + mc.e[2];
  MicroState s;
  s.q0 = q0;
  s.q0_dot = q0_dot;
  s.q0_ddot = q0_ddot;
  s.strain = strain;
  s.strain_rate = strain_rate;
  s.q1 = (-mc.fluid_fraction * strain - transverse * q0) / e1;
  s.q1_dot = (-mc.fluid_fraction * strain_rate - transverse * q0_dot) / e1;
  s.q1_ddot = -transverse * q0_ddot / e1;
  return s;
}

double axial_internal_force(const MacroCoefficients& mc, const MicroState& s) {
  return mc.f[0] * s.strain + mc.w[0] * s.strain_rate + mc.C[0][0] * s.q1 +
         (mc.C[0][1] + mc.C[0][2]) * s.q0 + mc.D[0][0] * s.q1_dot +
         (mc.D[0][1] + mc.D[0][2]) * s.q0_dot;
}

double transverse_internal_force(const MacroCoefficients& mc, const MicroState& s) {
  return mc.f[1] * s.strain + mc.w[1] * s.strain_rate + (mc.C[1][1] + mc.C[1][2]) * s.q0 +
         mc.C[1][0] * s.q1 + (mc.D[1][1] + mc.D[1][2]) * s.q0_dot + mc.D[1][0] * s.q1_dot;
}

double reduced_residual(const ReducedCoefficients& rc, const MicroState& s) {
  return s.q0_ddot + rc.alpha0 * s.q0_dot + rc.beta0 * s.q0 - rc.gamma0 * s.strain -
         rc.gamma1 * s.strain_rate;
}

double transverse_balance_residual(const MacroCoefficients& mc, const MicroState& s) {
  const double pressure = -(mc.m[0] * s.q1_ddot + axial_internal_force(mc, s)) / mc.e[0];
  return mc.m[1] * s.q0_ddot + transverse_internal_force(mc, s) + mc.e[1] * pressure;
}

std::vector<CoefficientRatio> compare_backends(const CubicSpec& spec,
                                               const MaterialParams& materials) {
  const ShapeFunctionSet shapes = spec.shapes();
  const MacroCoefficients a = macro_coefficients(shapes, materials, Backend::Formula);
  const MacroCoefficients b = macro_coefficients(shapes, materials, Backend::FirstPrinciples);
  const ReducedCoefficients ra = reduced_coefficients(spec, materials, Backend::Formula);
  const ReducedCoefficients rb = reduced_coefficients(spec, materials, Backend::FirstPrinciples);

  std::vector<CoefficientRatio> out;
  auto add = [&out](std::string name, double x, double y) {
    out.push_back({std::move(name), x, y, y != 0.0 ? x / y : std::nan("")});
  };
  add("m1", a.m[0], b.m[0]);
  add("e1", a.e[0], b.e[0]);
  add("f1", a.f[0], b.f[0]);
  add("f2", a.f[1], b.f[1]);
  add("f3", a.f[2], b.f[2]);
  add("w1", a.w[0], b.w[0]);
  add("w2", a.w[1], b.w[1]);
  add("C11", a.C[0][0], b.C[0][0]);
  add("C12", a.C[0][1], b.C[0][1]);
  add("D11", a.D[0][0], b.D[0][0]);
  add("D12", a.D[0][1], b.D[0][1]);
  add("alpha0", ra.alpha0, rb.alpha0);
  add("beta0", ra.beta0, rb.beta0);
  add("gamma0", ra.gamma0, rb.gamma0);
  add("gamma1", ra.gamma1, rb.gamma1);
  return out;
}

}  // namespace compacta
