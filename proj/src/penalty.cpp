#include "gaussbv/penalty.hpp"

#include "gaussbv/error.hpp"

namespace gaussbv {

std::vector<Estimate> penalty_sweep(const GaussianModel& model, const ConvexWeight& weight,
                                    const ConvexDomain& domain, const ScalarField& f, double t, const Point& x,
                                    const std::vector<double>& eps, const SdeConfig& cfg) {
  if (eps.empty()) throw InvalidArgument("penalty_sweep needs at least one epsilon");
  for (std::size_t i = 1; i < eps.size(); ++i)
    if (!(eps[i] < eps[i - 1])) throw InvalidArgument("penalty_sweep: eps must be strictly decreasing");
  const ScalarField ft = zero_extension(f, model, domain);
  std::vector<Estimate> out;
  out.reserve(eps.size());
  for (double e : eps) {
    const PenalizedPotential pot(model, weight, domain, e);
    out.push_back(apply_semigroup(pot, ft, t, x, cfg));
  }
  return out;
}

}  // namespace gaussbv
