#pragma once

#include "gaussbv/domain.hpp"
#include "gaussbv/estimate.hpp"
#include "gaussbv/model.hpp"
#include "gaussbv/weight.hpp"

namespace gaussbv {

// Phi_eps = U + d_Omega^2 / (2 eps); eps = infinity switches the penalty off.
class PenalizedPotential {
 public:
  PenalizedPotential(GaussianModel model, ConvexWeight weight, ConvexDomain domain, double epsilon = kInf);

  const GaussianModel& model() const { return model_; }
  const ConvexWeight& weight() const { return weight_; }
  const ConvexDomain& domain() const { return domain_; }
  double epsilon() const { return eps_; }
  bool penalized() const { return std::isfinite(eps_) && !domain_.is_whole_space(); }
  PenalizedPotential with_epsilon(double eps) const;

  double value(const Point& x) const;
  Vec gradient(const Point& x) const;  // Euclidean
  // b(x) = -x - Q grad Phi_eps(x), written to out.
  void drift(const Point& x, Eigen::Ref<Vec> out) const;
  // Q hess Phi_eps(x) as a v-operator.
  Mat h_hessian(const Point& x) const;
  void h_hessian(const Point& x, Eigen::Ref<Mat> out) const;
  double lower_bound() const { return weight_.lower_bound(); }

 private:
  GaussianModel model_;
  ConvexWeight weight_;
  ConvexDomain domain_;
  double eps_;
};

}  // namespace gaussbv
