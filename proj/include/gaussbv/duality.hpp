#pragma once

#include <functional>
#include <optional>

#include "gaussbv/mehler.hpp"
#include "gaussbv/potential.hpp"

namespace gaussbv {

// Finite-rank H-valued field g = sum_i g_i e_i, given by its coordinates in
// the orthonormal basis e_i = sqrt(lambda_i) v_i.
struct VectorField {
  std::function<Vec(const Point&)> e_coords;
  // Optional analytic diagonal partials d g_i / d x_i; central differences
  // otherwise.
  std::function<Vec(const Point&)> diagonal_partials;
  // Optional box [lo, hi] containing the support.
  std::optional<std::pair<Vec, Vec>> support;
};

// div_nu g = sum_i (D_i g_i - g_i D_i U - lambda_i^{-1/2} x_i g_i), D_i = sqrt(lambda_i) d/dx_i,
// so that the integral of <D_H u, g>_H equals minus the integral of u div_nu g.
double divnu_field(const GaussianModel& model, const ConvexWeight& weight, const VectorField& g, const Point& x);

struct DualityOptions {
  // Composite Gauss-Legendre over the support box (d <= 2).
  int panels = 4000;
  int points_per_panel = 4;
  GaussianQuadrature gaussian;
};

// Integral over Omega of u div_nu g against nu.
Estimate duality_lower_bound(const PenalizedPotential& potential, const ScalarField& u, const VectorField& g,
                             const DualityOptions& opt = {});

// Smooth bump g(x) = psi((x_1 - center) / width) along e_1, psi(0) = 1,
// supported in |x_1 - center| < width.
VectorField bump_field(int dim, double center, double width);

}  // namespace gaussbv
