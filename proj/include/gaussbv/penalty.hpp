#pragma once

#include <vector>

#include "gaussbv/sde.hpp"

namespace gaussbv {

// T_eps(t) f~(x) for each eps, f~ the zero extension of f outside Omega.
// The same random numbers are used for every eps.
std::vector<Estimate> penalty_sweep(const GaussianModel& model, const ConvexWeight& weight,
                                    const ConvexDomain& domain, const ScalarField& f, double t, const Point& x,
                                    const std::vector<double>& eps, const SdeConfig& cfg);

}  // namespace gaussbv
