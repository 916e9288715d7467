#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaussbv/mehler.hpp"
#include "gaussbv/sde.hpp"

namespace gaussbv {

enum class ExtrapolationModel { Exponential, Linear };

const char* to_string(ExtrapolationModel m);

struct VariationEstimate {
  // (t, value) with t strictly decreasing.
  std::vector<std::pair<double, Estimate>> curve;
  Estimate extrapolated;
  ExtrapolationModel model = ExtrapolationModel::Exponential;
  // Rate r of the exponential model V e^{-r t}.
  double rate = 1.0;
};

struct DeGiorgiOptions {
  std::size_t outer_samples = 100000;
  // Inner paths per outer point. A sign-definite gradient sample (the
  // jacobian-flow estimator in d = 1) needs only one.
  std::size_t inner_paths = 1;
  GradientOptions gradient;
};

// Default grid t_k = t0 2^{-k}, k = 0..points-1.
std::vector<double> geometric_t_grid(double t0, int points);

// Least-squares fit of V e^{-rate t} over the three smallest times, with a
// linear-in-t fallback when some residual exceeds 5 standard errors.
VariationEstimate extrapolate_curve(std::vector<std::pair<double, Estimate>> curve, double rate = 1.0);

// For each t the L1(Omega, nu; H) norm of D_H T_Omega(t) u, where T_Omega is
// realized by the penalized engine of `potential` and u is zero-extended.
VariationEstimate de_giorgi_curve(const PenalizedPotential& potential, const ScalarField& u,
                                  const std::vector<double>& t_list, const SdeConfig& cfg,
                                  const DeGiorgiOptions& opt = {});

enum class GradientNorm { H, Euclidean };

// Integral over Omega of |D_H u|_H (or |Du|) against nu.
Estimate smooth_variation_oracle(const PenalizedPotential& potential, const ScalarField& u, GradientNorm norm,
                                 const GaussianQuadrature& quad = {});

// Perimeter of E = {<a, x> < c} in Omega under nu:
// phi(c / sigma) E[e^{-U} 1_Omega | <a, X> = c], sigma = |Q^{1/2} a|.
Estimate halfspace_perimeter_oracle(const GaussianModel& model, const ConvexWeight& weight, const Vec& a, double c,
                                    const ConvexDomain& domain, const GaussianQuadrature& quad = {});

}  // namespace gaussbv
