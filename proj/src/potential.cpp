#include "gaussbv/potential.hpp"

#include "gaussbv/error.hpp"

namespace gaussbv {

PenalizedPotential::PenalizedPotential(GaussianModel model, ConvexWeight weight, ConvexDomain domain,
                                       double epsilon)
    : model_(std::move(model)), weight_(std::move(weight)), domain_(std::move(domain)), eps_(epsilon) {
  if (weight_.dim() != model_.dim()) throw InvalidArgument("weight dimension does not match model");
  if (domain_.dim() != model_.dim()) throw InvalidArgument("domain dimension does not match model");
  if (!(eps_ > 0.0)) throw InvalidArgument("penalty epsilon must be positive (or infinity)");
}

PenalizedPotential PenalizedPotential::with_epsilon(double eps) const {
  return PenalizedPotential(model_, weight_, domain_, eps);
}

double PenalizedPotential::value(const Point& x) const {
  double v = weight_.value(x);
  if (penalized()) {
    const double d = domain_.distance_h(model_, x);
    v += d * d / (2.0 * eps_);
  }
  return v;
}

Vec PenalizedPotential::gradient(const Point& x) const {
  Vec g = weight_.gradient(x);
  // grad (d^2) = Q^{-1} D_H d^2 = 2 Q^{-1} (x - pi).
  if (penalized()) g += (x - domain_.projection_h(model_, x)).cwiseQuotient(model_.eigenvalues()) / eps_;
  return g;
}

void PenalizedPotential::drift(const Point& x, Eigen::Ref<Vec> out) const {
  weight_.gradient(x, out);
  out = -x - model_.eigenvalues().cwiseProduct(out);
  if (penalized()) out -= (x - domain_.projection_h(model_, x)) / eps_;
}

void PenalizedPotential::h_hessian(const Point& x, Eigen::Ref<Mat> out) const {
  out.setZero();
  weight_.add_h_hessian(model_, x, out);
  if (penalized() && !domain_.contains(model_, x)) out += domain_.hess_h_dist_sq(model_, x) / (2.0 * eps_);
}

Mat PenalizedPotential::h_hessian(const Point& x) const {
  Mat m(x.size(), x.size());
  h_hessian(x, m);
  return m;
}

}  // namespace gaussbv
