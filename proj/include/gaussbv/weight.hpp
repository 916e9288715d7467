#pragma once

#include <functional>
#include <string>

#include "gaussbv/model.hpp"

namespace gaussbv {

// Convex, bounded-below weight U defining nu = e^{-U} gamma.
class ConvexWeight {
 public:
  enum class Kind { Zero, Quadratic, SmoothedNorm, Custom };

  struct CustomSpec {
    std::function<double(const Point&)> value;
    std::function<Vec(const Point&)> gradient;
    std::function<Mat(const Point&)> hessian;
    double h_lip = 0.0;
    double lower_bound = 0.0;
  };

  static ConvexWeight zero(int dim);
  // U(x) = 1/2 sum k_i x_i^2 with k_i >= 0.
  static ConvexWeight quadratic(Vec k);
  // U(x) = kappa sqrt(1 + |x|^2), kappa >= 0.
  static ConvexWeight smoothed_norm(int dim, double kappa);
  static ConvexWeight custom(int dim, CustomSpec spec);

  Kind kind() const { return kind_; }
  std::string name() const;
  int dim() const { return dim_; }

  double value(const Point& x) const;
  // Euclidean gradient and Hessian.
  void gradient(const Point& x, Eigen::Ref<Vec> out) const;
  Vec gradient(const Point& x) const;
  Mat hessian(const Point& x) const;
  // Adds Q * hess U(x) to out, the v-operator of D_H^2 U.
  void add_h_hessian(const GaussianModel& model, const Point& x, Eigen::Ref<Mat> out) const;

  // H-Lipschitz constant of D_H U for the given model.
  double h_lip(const GaussianModel& model) const;
  // inf U, used for rejection sampling of nu.
  double lower_bound() const;
  bool is_zero() const { return kind_ == Kind::Zero; }
  const Vec& quadratic_coefficients() const { return k_; }
  double kappa() const { return kappa_; }

 private:
  Kind kind_ = Kind::Zero;
  int dim_ = 0;
  Vec k_;
  double kappa_ = 0.0;
  CustomSpec custom_;
};

}  // namespace gaussbv
