#include "gaussbv/hyp_check.hpp"

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/nu_sampler.hpp"
#include "gaussbv/parallel.hpp"

namespace gaussbv {

Estimate check_hyp_d(const GaussianModel& model, const ConvexDomain& domain, const ConvexWeight& weight,
                     std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("check_hyp_d needs n >= 1");
  if (domain.is_whole_space()) return Estimate{0.0, 0.0, n, {}};
  // Sample nu on all of X: Phi with infinite epsilon is U.
  const PenalizedPotential pot(model, weight, ConvexDomain::whole_space(model.dim()));
  const NuSampler sampler(pot, NuSampler::Target::Domain, seed);
  const RunningStats s = reduce_blocks<RunningStats>(n, [&](std::size_t b, std::size_t e, RunningStats& acc) {
    Point x;
    for (std::size_t i = b; i < e; ++i) {
      sampler.draw(i, x);
      if (domain.contains(model, x)) {
        acc.add(0.0);
        continue;
      }
      const double d = domain.distance_h(model, x);
      const double hs = domain.hess_h_dist_sq_orthonormal(model, x).squaredNorm();
      acc.add(d > 0.0 ? hs / (d * d * d * d) : 0.0);
    }
  });
  Estimate est = scale_by_mass(s.estimate(), sampler.mass());
  est.meta.seed = seed;
  return est;
}

HypDReport hyp_d_doubling(const GaussianModel& model, const ConvexDomain& domain, const ConvexWeight& weight,
                          std::size_t n, int doublings, std::uint64_t seed) {
  HypDReport r;
  std::size_t m = n;
  for (int k = 0; k <= doublings; ++k, m *= 2) {
    r.sizes.push_back(m);
    r.estimates.push_back(check_hyp_d(model, domain, weight, m, seed));
    if (k > 0) {
      const Estimate& prev = r.estimates[r.estimates.size() - 2];
      const Estimate& cur = r.estimates.back();
      // Standard error of the smaller sample: a heavy tail inflates the
      // larger sample's own error together with its mean.
      if (cur.value - prev.value > 5.0 * prev.stderr()) r.divergent = true;
    }
  }
  return r;
}

}  // namespace gaussbv
