#pragma once

#include <cstdint>
#include <vector>

#include "gaussbv/estimate.hpp"
#include "gaussbv/field.hpp"
#include "gaussbv/model.hpp"

namespace gaussbv {

// Quadrature settings for Gaussian expectations. Tensor Gauss-Hermite is
// used up to max_tensor_dim; above it the expectation is sampled.
struct GaussianQuadrature {
  int order = 64;
  int max_tensor_dim = 3;
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

// E[g(sqrt(Q) Z)] for Z standard normal, with error estimate when sampled.
Estimate gaussian_expectation(const GaussianModel& model, const std::function<double(const Point&)>& g,
                              const GaussianQuadrature& rule = {});

// Ornstein-Uhlenbeck semigroup
// S(t) f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) sqrt(Q) Z).
Estimate mehler_apply(const GaussianModel& model, const ScalarField& f, double t, const Point& x,
                      const GaussianQuadrature& rule = {});

// n independent draws from the reference Gaussian.
std::vector<Point> sample_gamma(const GaussianModel& model, std::size_t n, std::uint64_t seed);

}  // namespace gaussbv
