#pragma once

#include <vector>

#include "gaussbv/field.hpp"
#include "gaussbv/potential.hpp"

namespace gaussbv {

struct PdeGridSpec {
  int nodes = 4001;
  double dt = 2e-4;
  // Infinite ends are cut at +-truncation * sqrt(lambda_1).
  double truncation = 8.0;
  // Backward Euler half steps before Crank-Nicolson, to damp the
  // oscillations a discontinuous initial datum excites.
  int startup_steps = 4;
};

struct PdeSolution {
  std::vector<double> x;
  std::vector<double> u;
  double t = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  // Sum of m_j |u_j| at t = 0, the scale for the mass drift.
  double mass_scale = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  // Piecewise-linear interpolation; throws outside the grid.
  double at(double x) const;
  double relative_mass_drift() const;
};

// Solves u_t = lambda u'' - (x + lambda Phi') u' with zero-flux ends, i.e.
// u_t = rho^{-1} (lambda rho u')' with rho = exp(-x^2/(2 lambda) - Phi).
// Unpenalized potentials are solved on Omega (an interval), which gives the
// Neumann semigroup T_Omega(t) f. A penalized potential is solved on the
// truncated line with Phi_eps, which gives T_eps(t) f.
// Vertex-centred finite volumes preserve sum_j m_j u_j exactly.
PdeSolution pde_reference_1d(const PenalizedPotential& potential, const ScalarField& f, double t,
                             const PdeGridSpec& grid = {});

}  // namespace gaussbv
