#pragma once

// Macro coefficients of the micro-structured model and the scalar
// coefficients of the reduced settling equation
//
//   Q0'' + alpha0 Q0' + beta0 Q0 = gamma0 dU + gamma1 dU'
//
// where dU = d1 U1 is the imposed axial macro-strain.
//
// Two backends exist. Formula evaluates the closed-form cubic-cell
// expressions for the density weighted shape moment and the four reduced
// scalars. FirstPrinciples averages the isotropic solid/fluid laws against
// the shape gradients over the cell and performs the elimination of Q1 and
// P itself. The backends do not agree numerically; compare_backends reports
// the ratios.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "compacta/cell_model.hpp"

namespace compacta {

enum class Backend { Formula, FirstPrinciples };
enum class AveragingRoute { ClosedForm, Quadrature };

// "paper" and "first-principles" are the CLI spellings.
std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

// Cubic cell with a cubic inclusion: l_i = l0, g_i = g*l0, h_i = h*l0.
struct CubicSpec {
  double l0 = 1.0;  // m
  double g = 0.5;   // split as a fraction of l0
  double h = 0.25;  // amplitude as a fraction of l0

  void validate() const;
  CellGeometry geometry() const;
  ShapeFunctionSet shapes() const;
  CubicSpec with_edge(double new_l0) const { return {new_l0, g, h}; }
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct MacroCoefficients {
  Vec3 e{};  // <d_i h^i>^F, also the pressure link factors
  Vec3 f{};  // Pa, elastic coupling to the axial macro-strain
  // Pa s, viscous coupling to the axial macro-strain rate. Renamed from the
  // customary g_i to keep it apart from the geometric split.
  Vec3 w{};
  Matrix3 C{};  // Pa
  Matrix3 D{};  // Pa s
  Vec3 m{};     // <rho (h^i)^2>, kg/m
  double fluid_fraction = 0.0;
  double mean_density = 0.0;  // <rho>, kg/m^3
  Backend backend = Backend::FirstPrinciples;

  const Vec3& link_factors() const { return e; }
};

// Formula is only defined on cubic geometries and throws
// UnsupportedConfiguration otherwise. It differs from FirstPrinciples in the
// density moment m_i and in f_3, which uses the product <lambda_S> <d_3 h^3>^S.
MacroCoefficients macro_coefficients(const ShapeFunctionSet& shapes, const MaterialParams& materials,
                                     Backend backend,
                                     AveragingRoute route = AveragingRoute::ClosedForm);

struct ReducedCoefficients {
  double alpha0 = 0.0;  // 1/s
  double beta0 = 0.0;   // 1/s^2
  double gamma0 = 0.0;  // 1/s^2
  double gamma1 = 0.0;  // 1/s
  Backend backend = Backend::Formula;

  double discriminant() const { return alpha0 * alpha0 - 4.0 * beta0; }
};

// Eliminates Q1 (incompressibility constraint) and P (axial micro balance)
// from the two micro balances under the transverse symmetry Q2 = Q3 = Q0.
// Throws SingularError when e1 = 0 or the effective inertia vanishes.
ReducedCoefficients eliminate(const MacroCoefficients& mc);

// Rejects a non-zero body force: the reduced scenario has none.
ReducedCoefficients reduced_coefficients(const CubicSpec& spec, const MaterialParams& materials,
                                         Backend backend);

// Homogenized (l -> 0) first-order model. The tilde coefficients equal the
// reduced ones; only their l-independent ratios enter the solutions.
struct HomogenizedCoefficients {
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  Backend backend = Backend::Formula;

  double relaxation_rate() const { return beta0 / alpha0; }
  // Amplitude of the relaxing exponential during settling:
  // eta * (alpha0 gamma0 / (beta0^2 t0) - gamma1 / (beta0 t0)).
  double settling_amplitude(double eta, double t0) const;
};

HomogenizedCoefficients homogenized_coefficients(const CubicSpec& spec,
                                                 const MaterialParams& materials, Backend backend);
HomogenizedCoefficients homogenized_from(const ReducedCoefficients& rc);

// Edge length at which alpha0^2 = 4 beta0. Found by bisection on the sign of
// the discriminant and cross-checked against a closed form; both must agree
// to 1e-9 relative.
struct CriticalLength {
  double bisection = 0.0;
  double closed_form = 0.0;
};

CriticalLength critical_length(const MaterialParams& materials, double g, double h,
                               Backend backend = Backend::Formula);

// 9 (g visc_s + (1-g) visc_f)^2 / (g mu_s (g^3 rho_s + (1-g)^3 rho_f)): the
// overdamped bound on l0^2 for the Formula backend.
double overdamped_bound_l0_squared(const MaterialParams& materials, double g);

// Full micro state under the transverse symmetry, with Q1 and its rates
// recovered from the incompressibility constraint.
struct MicroState {
  double q0 = 0.0, q0_dot = 0.0, q0_ddot = 0.0;
  double q1 = 0.0, q1_dot = 0.0, q1_ddot = 0.0;
  double strain = 0.0;       // d1 U1
  double strain_rate = 0.0;  // d1 U1'
};

// Q1 = (-phi_F dU - (e2 + e3) Q0) / e1; the strain is piecewise linear in
// time so its second derivative is taken as zero.
MicroState complete_state(const MacroCoefficients& mc, double q0, double q0_dot, double q0_ddot,
                          double strain, double strain_rate);

// Internal micro forces H_1^1 and H_2^2 for the transverse-symmetric state.
double axial_internal_force(const MacroCoefficients& mc, const MicroState& s);
double transverse_internal_force(const MacroCoefficients& mc, const MicroState& s);

// Residual of the scalar ODE, and of the transverse micro balance after P
// has been taken from the axial balance.
double reduced_residual(const ReducedCoefficients& rc, const MicroState& s);
double transverse_balance_residual(const MacroCoefficients& mc, const MicroState& s);
// Effective inertia that links the two residuals above.
double effective_inertia(const MacroCoefficients& mc);

struct CoefficientRatio {
  std::string name;
  double formula = 0.0;
  double first_principles = 0.0;
  double ratio = 0.0;  // formula / first_principles
};

std::vector<CoefficientRatio> compare_backends(const CubicSpec& spec,
                                               const MaterialParams& materials);

}  // namespace compacta
