#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "compacta/coefficients.hpp"
#include "compacta/errors.hpp"

using namespace compacta;

namespace {

MaterialParams base_materials() { return {2000.0, 1000.0, 1e7, 1e7, 1e5, 1e3, {0.0, 0.0, 0.0}}; }

const CubicSpec kBase{1.0, 0.5, 0.25};

// Cubic-cell averages of the triangle waves, normalized by |V| (h, g in units of l0).
struct CubeAverages {
  double grad_s, grad_f, sq_s, sq_f, cross_s, cross_f;
};

CubeAverages cube_averages(double g, double h) {
  const double r = 1.0 - g;
  return {-2.0 * h * r * r,
          2.0 * h * r * r,
          4.0 * h * h / g + 4.0 * h * h * g * (2.0 - g) / r,
          4.0 * h * h * r,
          -4.0 * h * h * r,
          4.0 * h * h * r};
}

// Macro coefficients of the cube written out by hand.
MacroCoefficients hand_macro(const CubicSpec& s, const MaterialParams& m) {
  const CubeAverages a = cube_averages(s.g, s.h);
  const double r3 = std::pow(1.0 - s.g, 3);
  MacroCoefficients mc;
  mc.fluid_fraction = r3;
  for (int i = 0; i < 3; ++i) {
    mc.e[i] = a.grad_f;
    mc.f[i] = (i == 0 ? m.lambda_s + 2.0 * m.mu_s : m.lambda_s) * a.grad_s;
    mc.w[i] = (i == 0 ? 4.0 / 3.0 : -2.0 / 3.0) * (m.visc_s * a.grad_s + m.visc_f * a.grad_f);
    mc.m[i] = s.h * s.h * s.l0 * s.l0 / 3.0 * ((1.0 - r3) * m.rho_s + r3 * m.rho_f);
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        mc.C[i][j] = (m.lambda_s + 2.0 * m.mu_s) * a.sq_s;
        mc.D[i][j] = 4.0 / 3.0 * (m.visc_s * a.sq_s + m.visc_f * a.sq_f);
      } else {
        mc.C[i][j] = m.lambda_s * a.cross_s;
        mc.D[i][j] = -2.0 / 3.0 * (m.visc_s * a.cross_s + m.visc_f * a.cross_f);
      }
    }
  }
  return mc;
}

// Transverse balance with P eliminated through the axial balance; written
// independently of the library's force routines.
double system_residual(const MacroCoefficients& mc, double q0, double q0d, double q0dd, double s, double sd) {
  const double e1 = mc.e[0], e2 = mc.e[1], e3 = mc.e[2];
  const double q1 = (-mc.fluid_fraction * s - (e2 + e3) * q0) / e1;
  const double q1d = (-mc.fluid_fraction * sd - (e2 + e3) * q0d) / e1;
  const double q1dd = -(e2 + e3) * q0dd / e1;
  const double h1 = mc.f[0] * s + mc.w[0] * sd + mc.C[0][0] * q1 + (mc.C[0][1] + mc.C[0][2]) * q0 +
                    mc.D[0][0] * q1d + (mc.D[0][1] + mc.D[0][2]) * q0d;
  const double p = -(mc.m[0] * q1dd + h1) / e1;
  const double h2 = mc.f[1] * s + mc.w[1] * sd + (mc.C[1][1] + mc.C[1][2]) * q0 + mc.C[1][0] * q1 +
                    (mc.D[1][1] + mc.D[1][2]) * q0d + mc.D[1][0] * q1d;
  return mc.m[1] * q0dd + h2 + e2 * p;
}

// Reduced scalars read off the eliminated system by probing unit states.
ReducedCoefficients probe(const MacroCoefficients& mc) {
  const double inertia = system_residual(mc, 0, 0, 1, 0, 0);
  ReducedCoefficients rc;
  rc.alpha0 = system_residual(mc, 0, 1, 0, 0, 0) / inertia;
  rc.beta0 = system_residual(mc, 1, 0, 0, 0, 0) / inertia;
  rc.gamma0 = -system_residual(mc, 0, 0, 0, 1, 0) / inertia;
  rc.gamma1 = -system_residual(mc, 0, 0, 0, 0, 1) / inertia;
  return rc;
}

}  // namespace

TEST(Backend, Names) {
  EXPECT_EQ(parse_backend("paper"), Backend::Formula);
  EXPECT_EQ(parse_backend("first-principles"), Backend::FirstPrinciples);
  EXPECT_EQ(to_string(Backend::Formula), "paper");
  EXPECT_THROW(parse_backend("exact"), ValidationError);
}

TEST(MacroCoefficients, BaseCube) {
  const MaterialParams m = base_materials();
  const MacroCoefficients fp = macro_coefficients(kBase.shapes(), m, Backend::FirstPrinciples);
  const MacroCoefficients pf = macro_coefficients(kBase.shapes(), m, Backend::Formula);
  EXPECT_NEAR(fp.e[0], 2.0 * 0.25 * 0.25, 1e-15);
  EXPECT_NEAR(fp.m[0], 39.0625, 1e-12);
  // 3 l0^2 h^2 (g^3 rho_S + (1 - g)^3 rho_F) / 3
  EXPECT_NEAR(pf.m[0], 0.25 * 0.25 * 3.0 * (0.125 * 2000.0 + 0.125 * 1000.0) / 3.0, 1e-12);
  EXPECT_NEAR(pf.m[0], 23.4375, 1e-12);
  EXPECT_NEAR(pf.f[2], (1.0 - 0.125) * fp.f[2], 1e-6);
  EXPECT_NEAR(fp.fluid_fraction, 0.125, 1e-15);
  EXPECT_NEAR(fp.mean_density, 0.875 * 2000.0 + 0.125 * 1000.0, 1e-9);
}

TEST(MacroCoefficients, MatchesHandDerivation) {
  const MaterialParams m = base_materials();
  for (const CubicSpec s : {kBase, CubicSpec{2.0, 0.3, 0.1}, CubicSpec{0.5, 0.8, 0.4}}) {
    const MacroCoefficients lib = macro_coefficients(s.shapes(), m, Backend::FirstPrinciples);
    const MacroCoefficients ref = hand_macro(s, m);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(lib.e[i], ref.e[i], 1e-13 * std::abs(ref.e[i]));
      EXPECT_NEAR(lib.f[i], ref.f[i], 1e-13 * std::abs(ref.f[i]));
      EXPECT_NEAR(lib.w[i], ref.w[i], 1e-13 * std::abs(ref.w[i]));
      EXPECT_NEAR(lib.m[i], ref.m[i], 1e-13 * std::abs(ref.m[i]));
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(lib.C[i][j], ref.C[i][j], 1e-12 * std::abs(ref.C[i][j]));
        EXPECT_NEAR(lib.D[i][j], ref.D[i][j], 1e-12 * std::abs(ref.D[i][j]));
      }
    }
  }
}

TEST(MacroCoefficients, Invariants) {
  const MacroCoefficients mc = macro_coefficients(CubicSpec{1.3, 0.35, 0.2}.shapes(), base_materials(),
                                                  Backend::FirstPrinciples);
  for (int i = 0; i < 3; ++i) {
    EXPECT_GT(mc.C[i][i], 0.0);
    EXPECT_GT(mc.D[i][i], 0.0);
    EXPECT_GT(mc.m[i], 0.0);
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(mc.C[i][j], mc.C[j][i]);
      EXPECT_EQ(mc.D[i][j], mc.D[j][i]);
    }
  }
}

TEST(MacroCoefficients, FormulaRejectsNonCubic) {
  const ShapeFunctionSet s(CellGeometry({1.0, 2.0, 1.0}, {0.5, 0.5, 0.5}), {0.2, 0.2, 0.2});
  EXPECT_THROW(macro_coefficients(s, base_materials(), Backend::Formula), UnsupportedConfiguration);
  EXPECT_NO_THROW(macro_coefficients(s, base_materials(), Backend::FirstPrinciples));
}

TEST(MacroCoefficients, RoutesAgree) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> l(0.1, 10.0), g(0.05, 0.95), h(0.05, 0.5);
  for (int n = 0; n < 20; ++n) {
    const CubicSpec s{l(rng), g(rng), h(rng)};
    for (Backend b : {Backend::Formula, Backend::FirstPrinciples}) {
      const MacroCoefficients a = macro_coefficients(s.shapes(), base_materials(), b, AveragingRoute::ClosedForm);
      const MacroCoefficients q = macro_coefficients(s.shapes(), base_materials(), b, AveragingRoute::Quadrature);
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(a.e[i], q.e[i], 1e-13 * std::abs(q.e[i]));
        EXPECT_NEAR(a.m[i], q.m[i], 1e-13 * std::abs(q.m[i]));
        EXPECT_NEAR(a.C[i][i], q.C[i][i], 1e-13 * std::abs(q.C[i][i]));
        EXPECT_NEAR(a.D[0][i], q.D[0][i], 1e-13 * std::abs(q.D[0][i]));
      }
    }
  }
}

TEST(ReducedCoefficients, FormulaBaseValues) {
  const ReducedCoefficients rc = reduced_coefficients(kBase, base_materials(), Backend::Formula);
  const double g = 0.5, h = 0.25, d = 0.125 * 2000.0 + 0.125 * 1000.0;
  EXPECT_NEAR(rc.alpha0, 24.0 * (g * 1e5 + (1 - g) * 1e3) / d, 1e-10);
  EXPECT_NEAR(rc.alpha0, 3232.0, 1e-9);
  EXPECT_NEAR(rc.beta0, 16.0 * g * 1e7 / d, 1e-8);
  EXPECT_NEAR(rc.beta0, 213333.33333333, 1e-6);
  EXPECT_NEAR(rc.gamma0, -8.0 * g * g * 1e7 / (h * d), 1e-8);
  EXPECT_NEAR(rc.gamma1, 4.0 / (3.0 * h) * (-g * g * 1e5 + (1 - g) * (1 - g) * 1e3) / d, 1e-10);
  EXPECT_NEAR(rc.gamma1, -352.0, 1e-10);
  EXPECT_NEAR(rc.discriminant(), 3232.0 * 3232.0 - 4.0 * 213333.33333333334, 1e-6);
}

TEST(ReducedCoefficients, EliminationMatchesProbe) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> l(0.2, 8.0), g(0.1, 0.9), h(0.05, 0.45);
  for (int n = 0; n < 25; ++n) {
    const CubicSpec s{l(rng), g(rng), h(rng)};
    const MacroCoefficients mc = macro_coefficients(s.shapes(), base_materials(), Backend::FirstPrinciples);
    const ReducedCoefficients lib = eliminate(mc);
    const ReducedCoefficients ref = probe(hand_macro(s, base_materials()));
    EXPECT_NEAR(lib.alpha0, ref.alpha0, 1e-10 * std::abs(ref.alpha0));
    EXPECT_NEAR(lib.beta0, ref.beta0, 1e-10 * std::abs(ref.beta0));
    EXPECT_NEAR(lib.gamma0, ref.gamma0, 1e-10 * std::abs(ref.gamma0));
    EXPECT_NEAR(lib.gamma1, ref.gamma1, 1e-10 * std::abs(ref.gamma1));
  }
}

TEST(ReducedCoefficients, FirstPrinciplesBaseValues) {
  const ReducedCoefficients rc = reduced_coefficients(kBase, base_materials(), Backend::FirstPrinciples);
  const ReducedCoefficients ref = probe(hand_macro(kBase, base_materials()));
  EXPECT_NEAR(rc.alpha0, ref.alpha0, 1e-10 * ref.alpha0);
  EXPECT_NEAR(rc.beta0, 704000.0, 1e-6);
  EXPECT_NEAR(rc.gamma0, -256000.0, 1e-6);
}

TEST(ReducedCoefficients, ResidualIdentity) {
  const MacroCoefficients mc = macro_coefficients(CubicSpec{1.7, 0.4, 0.3}.shapes(), base_materials(),
                                                  Backend::FirstPrinciples);
  const ReducedCoefficients rc = eliminate(mc);
  const double inertia = effective_inertia(mc);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const MicroState s = complete_state(mc, n(rng), n(rng), n(rng), n(rng), n(rng));
    const double lhs = transverse_balance_residual(mc, s);
    const double rhs = inertia * reduced_residual(rc, s);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(std::abs(lhs), 1e-3 * (std::abs(mc.C[1][1]))));
  }
}

TEST(ReducedCoefficients, ScaleAsInverseSquare) {
  for (Backend b : {Backend::Formula, Backend::FirstPrinciples}) {
    const ReducedCoefficients a = reduced_coefficients(kBase, base_materials(), b);
    const ReducedCoefficients c = reduced_coefficients(kBase.with_edge(3.0), base_materials(), b);
    EXPECT_NEAR(c.alpha0 * 9.0, a.alpha0, 1e-12 * a.alpha0);
    EXPECT_NEAR(c.beta0 * 9.0, a.beta0, 1e-12 * a.beta0);
    EXPECT_NEAR(c.gamma0 * 9.0, a.gamma0, 1e-12 * std::abs(a.gamma0));
    EXPECT_NEAR(c.gamma1 * 9.0, a.gamma1, 1e-12 * std::abs(a.gamma1));
  }
}

TEST(ReducedCoefficients, PositiveOverRandomInputs) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 100; ++n) {
    const MaterialParams m{500.0 + 3000.0 * u(rng), 500.0 + 1500.0 * u(rng), 1e6 + 1e8 * u(rng),
                           1e6 + 1e8 * u(rng),     1e3 + 1e6 * u(rng),      1e-3 + 1e4 * u(rng), {0, 0, 0}};
    const CubicSpec s{0.1 + 10.0 * u(rng), 0.05 + 0.9 * u(rng), 0.05 + 0.45 * u(rng)};
    for (Backend b : {Backend::Formula, Backend::FirstPrinciples}) {
      const ReducedCoefficients rc = reduced_coefficients(s, m, b);
      EXPECT_GT(rc.alpha0, 0.0);
      EXPECT_GT(rc.beta0, 0.0);
    }
  }
}

TEST(ReducedCoefficients, Errors) {
  MaterialParams m = base_materials();
  m.body_force = {0.0, 0.0, -9.81};
  EXPECT_THROW(reduced_coefficients(kBase, m, Backend::Formula), ValidationError);
  EXPECT_THROW(reduced_coefficients(CubicSpec{1.0, 1.0, 0.25}, base_materials(), Backend::Formula), ValidationError);
  MacroCoefficients mc = macro_coefficients(kBase.shapes(), base_materials(), Backend::FirstPrinciples);
  mc.e = {0.0, 0.0, 0.0};
  EXPECT_THROW(eliminate(mc), SingularError);
}

TEST(Homogenized, Ratios) {
  const HomogenizedCoefficients hc = homogenized_coefficients(kBase, base_materials(), Backend::Formula);
  EXPECT_NEAR(hc.relaxation_rate(), 213333.33333333334 / 3232.0, 1e-10);
  EXPECT_NEAR(hc.relaxation_rate(), 66.0066, 1e-4);
  EXPECT_NEAR(hc.gamma0 / hc.beta0, -0.5 / (2.0 * 0.25), 1e-14);
  const HomogenizedCoefficients big = homogenized_coefficients(kBase.with_edge(10.0), base_materials(), Backend::Formula);
  EXPECT_NEAR(big.relaxation_rate(), hc.relaxation_rate(), 1e-12 * hc.relaxation_rate());
  EXPECT_NEAR(big.gamma0 / big.beta0, hc.gamma0 / hc.beta0, 1e-12);
  // eta (alpha gamma0 / (beta^2 t0) - gamma1 / (beta t0))
  const double a3 = 0.01 * (3232.0 * hc.gamma0 / (hc.beta0 * hc.beta0 * 10.0) - hc.gamma1 / (hc.beta0 * 10.0));
  EXPECT_NEAR(hc.settling_amplitude(0.01, 10.0), a3, 1e-18);
}

TEST(CriticalLength, BaseMaterials) {
  const MaterialParams m = base_materials();
  const CriticalLength cl = critical_length(m, 0.5, 0.25);
  const double n = 0.5 * 1e5 + 0.5 * 1e3;
  const double d = 0.125 * 2000.0 + 0.125 * 1000.0;
  const double oracle = 3.0 * n / std::sqrt(0.5 * 1e7 * d);
  EXPECT_NEAR(cl.bisection, oracle, 1e-9 * oracle);
  EXPECT_NEAR(cl.closed_form, oracle, 1e-12 * oracle);
  EXPECT_NEAR(oracle, 3.49874, 1e-5);
  EXPECT_NEAR(overdamped_bound_l0_squared(m, 0.5), oracle * oracle, 1e-10);
}

TEST(CriticalLength, LinearInViscosity) {
  MaterialParams m = base_materials();
  const double base = critical_length(m, 0.5, 0.25).bisection;
  m.visc_s *= 2.0;
  m.visc_f *= 2.0;
  EXPECT_NEAR(critical_length(m, 0.5, 0.25).bisection, 2.0 * base, 1e-9 * base);
  m = base_materials();
  m.visc_s *= 2.0;
  const double ratio = (0.5 * 2e5 + 0.5 * 1e3) / (0.5 * 1e5 + 0.5 * 1e3);
  EXPECT_NEAR(critical_length(m, 0.5, 0.25).bisection, ratio * base, 1e-9 * base);
}

TEST(CriticalLength, FirstPrinciples) {
  const CriticalLength cl = critical_length(base_materials(), 0.5, 0.25, Backend::FirstPrinciples);
  EXPECT_NEAR(cl.bisection, cl.closed_form, 1e-9 * cl.closed_form);
  const ReducedCoefficients rc =
      reduced_coefficients(kBase.with_edge(cl.closed_form), base_materials(), Backend::FirstPrinciples);
  EXPECT_LE(std::abs(rc.discriminant()), 1e-9 * rc.alpha0 * rc.alpha0);
}

TEST(CriticalLength, SingleSignChange) {
  int flips = 0;
  double previous = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double l0 = 0.1 * std::pow(200.0, k / 200.0);
    const double d = reduced_coefficients(kBase.with_edge(l0), base_materials(), Backend::Formula).discriminant();
    if (k > 0 && (d > 0) != (previous > 0)) ++flips;
    previous = d;
  }
  EXPECT_EQ(flips, 1);
}

TEST(CriticalLength, RegimesAroundIt) {
  const ReducedCoefficients one = reduced_coefficients(kBase, base_materials(), Backend::Formula);
  const ReducedCoefficients ten = reduced_coefficients(kBase.with_edge(10.0), base_materials(), Backend::Formula);
  EXPECT_GT(one.discriminant(), 0.0);
  EXPECT_NEAR(ten.alpha0 * ten.alpha0, 1044.6, 0.05);
  EXPECT_NEAR(4.0 * ten.beta0, 8533.3, 0.05);
}

TEST(CompareBackends, ReportsDensityMoment) {
  const auto rows = compare_backends(kBase, base_materials());
  bool seen = false;
  for (const auto& r : rows) {
    if (r.name == "m1") {
      seen = true;
      EXPECT_NEAR(r.formula, 23.4375, 1e-12);
      EXPECT_NEAR(r.first_principles, 39.0625, 1e-12);
      EXPECT_NEAR(r.ratio, 0.6, 1e-14);
    }
  }
  EXPECT_TRUE(seen);
}
