#pragma once

#include <cstdint>

#include "gaussbv/estimate.hpp"
#include "gaussbv/potential.hpp"

namespace gaussbv {

// Draws from nu restricted to Omega (Target::Domain) or from the penalized
// measure nu_eps on X (Target::Penalized), normalized to probability.
// Rejection from gamma with acceptance e^{-(Phi - inf Phi)}; a quadratic
// weight on the whole space is sampled exactly.
class NuSampler {
 public:
  enum class Target { Domain, Penalized };

  NuSampler(const PenalizedPotential& potential, Target target, std::uint64_t seed,
            double min_acceptance = 0.01);

  // Deterministic draw number i; returns the number of proposals used.
  int draw(std::uint64_t i, Point& out) const;

  double acceptance_rate() const { return acceptance_; }
  // Total mass of the unnormalized target, nu(Omega) or nu_eps(X).
  const Estimate& mass() const { return mass_; }
  bool exact() const { return exact_; }

 private:
  bool accept(const Point& y, double u) const;

  const PenalizedPotential& pot_;
  Target target_;
  std::uint64_t seed_;
  bool exact_ = false;
  Vec exact_sd_;
  double acceptance_ = 1.0;
  Estimate mass_;
};

// Multiplies a conditional mean by the target mass with delta-method error.
Estimate scale_by_mass(const Estimate& conditional_mean, const Estimate& mass);

}  // namespace gaussbv
