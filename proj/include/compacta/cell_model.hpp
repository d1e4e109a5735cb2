#pragma once

// Periodicity cell of the solid matrix with a single box-shaped fluid
// inclusion, the triangle-wave micro-shape functions, and phase-restricted
// cell averaging.
//
// Coordinates are cell-local, x_i in [0, l_i). Along axis i the cell is split
// at g_i; the fluid inclusion is the open box prod_i (g_i, l_i) and the solid
// matrix is everything else. Axis indices are zero-based (0, 1, 2).

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace compacta {

using Vec3 = std::array<double, 3>;

enum class Phase { Solid, Fluid };
enum class Region { All, Solid, Fluid };

// Lamé constants and Stokes viscosities of the two constituents.
struct MaterialParams {
  double rho_s = 0.0;       // kg/m^3
  double rho_f = 0.0;       // kg/m^3
  double lambda_s = 0.0;    // Pa
  double mu_s = 0.0;        // Pa
  double visc_s = 0.0;      // Pa s, solid Stokes viscosity
  double visc_f = 0.0;      // Pa s, fluid Stokes viscosity
  Vec3 body_force{0.0, 0.0, 0.0};  // m/s^2

  void validate() const;
  bool has_body_force() const;
};

struct PhasePartition {
  Vec3 fluid_lower;  // g_i
  Vec3 fluid_upper;  // l_i
  double fluid_fraction;
  double solid_fraction;
};

class CellGeometry {
 public:
  // Throws ValidationError unless 0 < g_i < l_i.
  CellGeometry(Vec3 edges, Vec3 splits);

  double edge(int axis) const;
  double split(int axis) const;
  const Vec3& edges() const { return edges_; }
  const Vec3& splits() const { return splits_; }

  // l = sqrt(l1^2 + l2^2 + l3^2)
  double length_scale() const { return length_scale_; }
  double volume() const { return edges_[0] * edges_[1] * edges_[2]; }
  bool is_cubic() const;

  PhasePartition partition() const;
  double fluid_fraction() const;

  // Fluid iff p lies in the open fluid box; boundary points belong to the
  // solid. p is reduced into the cell first.
  Phase phase_at(const Vec3& p) const;

  // Reduces x modulo l_i into [0, l_i).
  double wrap(int axis, double x) const;

 private:
  Vec3 edges_;
  Vec3 splits_;
  double length_scale_;
};

// Triangle-wave micro-shape functions h^i(x_i): +h_i at 0, -h_i at g_i,
// +h_i at l_i, extended periodically.
class ShapeFunctionSet {
 public:
  // Throws ValidationError unless every amplitude is positive. The O(l)
  // bound h_i <= l is checked by validate_shape_properties, not here.
  ShapeFunctionSet(CellGeometry geometry, Vec3 amplitudes);

  const CellGeometry& geometry() const { return geometry_; }
  double amplitude(int axis) const;

  double value(int axis, double x) const;
  // At a kink the right-limit slope is returned.
  double gradient(int axis, double x) const;

  // Slopes of the two linear branches: on (0, g_i) and on (g_i, l_i).
  double solid_branch_slope(int axis) const;
  double fluid_branch_slope(int axis) const;

 private:
  CellGeometry geometry_;
  Vec3 amplitudes_;
};

using Integrand = std::function<double(const Vec3&)>;

// (1/|V|) * integral of f over the selected region, by tensor-product
// 3-point Gauss-Legendre on each of the 8 sub-boxes cut at the splits.
// Exact for integrands that are polynomial of degree <= 5 per axis on every
// sub-box.
double cell_average(const CellGeometry& geometry, const Integrand& f, Region region);

// Exponents of one axis factor h^i(x_i)^p * (d_i h^i)^q of a separable
// integrand.
struct AxisFactor {
  int value_power = 0;
  int gradient_power = 0;
};

// Closed-form (1/|V|) * integral over the region of
// prod_i h^i(x_i)^{p_i} (d_i h^i)^{q_i}. Integrates each linear branch
// exactly.
double separable_average(const ShapeFunctionSet& shapes,
                         const std::array<AxisFactor, 3>& factors, Region region);

struct AxisShapeReport {
  double mean_solid = 0.0;
  double mean_fluid = 0.0;
  double max_value_over_l = 0.0;
  double max_gradient = 0.0;
};

struct ShapeReport {
  std::array<AxisShapeReport, 3> axes;
  bool passed = true;
  std::vector<std::string> failures;
};

// Checks the zero phase-mean axiom (to 1e-12 l) and the O(l) amplitude
// bound. Means are computed by quadrature so they are independent of the
// closed-form integration route.
ShapeReport validate_shape_properties(const ShapeFunctionSet& shapes);

}  // namespace compacta
