#pragma once

#include <cstdint>
#include <vector>

#include "gaussbv/domain.hpp"
#include "gaussbv/estimate.hpp"
#include "gaussbv/weight.hpp"

namespace gaussbv {

struct HypDReport {
  // Estimates at n, 2n, 4n, ... samples.
  std::vector<std::size_t> sizes;
  std::vector<Estimate> estimates;
  // Raised when some estimate exceeds its predecessor by more than 5 of the
  // predecessor's standard errors.
  bool divergent = false;
};

// Monte Carlo estimate of the integral over the complement of Omega of
// d^{-4} ||D_H^2 d^2||_HS^2 against nu.
Estimate check_hyp_d(const GaussianModel& model, const ConvexDomain& domain, const ConvexWeight& weight,
                     std::size_t n, std::uint64_t seed);

// Runs check_hyp_d at n, 2n, ..., 2^{doublings} n and applies the
// divergence criterion.
HypDReport hyp_d_doubling(const GaussianModel& model, const ConvexDomain& domain, const ConvexWeight& weight,
                          std::size_t n, int doublings, std::uint64_t seed);

}  // namespace gaussbv
