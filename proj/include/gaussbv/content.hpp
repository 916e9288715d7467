#pragma once

#include "gaussbv/sde.hpp"

namespace gaussbv {

struct ContentOptions {
  std::size_t outer_samples = 100000;
  // Inner paths for the nested |T u - u|. For an indicator the difference
  // chi_E(X_t) - chi_E(x) has a sign fixed by x, so one path is unbiased.
  std::size_t inner_paths = 1;
  // Integrate against nu_eps on X instead of nu on Omega. T_eps is conservative
  // and nu_eps-symmetric on X, so the half-side identity is exact there.
  bool penalized_measure = false;
};

// (1/sqrt t) ||T_Omega(t) u - u||_{L1(Omega, nu)}.
Estimate ou_content(const PenalizedPotential& potential, const ScalarField& u, double t, const SdeConfig& cfg,
                    const ContentOptions& opt = {});

// (2/sqrt t) integral over Omega minus E of T_Omega(t) chi_E.
Estimate ou_content_halfside(const PenalizedPotential& potential, const ScalarField& chi_e, double t,
                             const SdeConfig& cfg, const ContentOptions& opt = {});

// (1/sqrt t) double integral of |u(e^{-t} x + sqrt(1 - e^{-2t}) y) - u(x)|
// over x ~ nu on Omega and y ~ gamma; cfg.paths samples.
Estimate ledoux_content(const GaussianModel& model, const ConvexWeight& weight, const ConvexDomain& domain,
                        const ScalarField& u, double t, const SdeConfig& cfg);

}  // namespace gaussbv
