#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "gaussbv/model.hpp"

namespace gaussbv {

// Indicator of the half-space {x : <a, x> < c}, Euclidean pairing in v-coordinates.
struct HalfSpaceIndicator {
  Vec a;
  double c = 0.0;
};

// A real function on X with an optional analytic gradient and Hessian.
// Missing derivatives fall back to central differences with step
// 1e-5 * max(1, |x_i|).
class ScalarField {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using GradientFn = std::function<Vec(const Point&)>;
  using HessianFn = std::function<Mat(const Point&)>;

  ScalarField() = default;
  explicit ScalarField(ValueFn value, GradientFn gradient = {}, HessianFn hessian = {});

  static ScalarField constant(double c);
  static ScalarField linear(Vec a, double b = 0.0);
  static ScalarField indicator(HalfSpaceIndicator e);

  double operator()(const Point& x) const { return value_(x); }
  Vec gradient(const Point& x) const;
  Mat hessian(const Point& x) const;
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

  // Indicator fields are not differentiable; gradient estimators use the
  // Gaussian mollification f * N(0, delta^2 I) instead.
  const std::optional<HalfSpaceIndicator>& indicator_info() const { return indicator_; }
  bool is_indicator() const { return indicator_.has_value(); }
  double mollified_value(const Point& x, double delta) const;
  Vec mollified_gradient(const Point& x, double delta) const;

  ScalarField& set_bounded(double sup_abs);
  ScalarField& set_lipschitz(bool v = true);
  ScalarField& set_name(std::string name);
  bool bounded() const { return sup_abs_ < std::numeric_limits<double>::infinity(); }
  double sup_abs() const { return sup_abs_; }
  bool lipschitz() const { return lipschitz_; }
  const std::string& name() const { return name_; }

 private:
  ValueFn value_;
  GradientFn gradient_;
  HessianFn hessian_;
  std::optional<HalfSpaceIndicator> indicator_;
  double sup_abs_ = std::numeric_limits<double>::infinity();
  bool lipschitz_ = false;
  std::string name_;
};

Vec finite_difference_gradient(const ScalarField::ValueFn& f, const Point& x);
Mat finite_difference_hessian(const std::function<Vec(const Point&)>& grad, const Point& x);

// D_H f(x) = Q grad f(x).
HVector h_gradient(const GaussianModel& model, const ScalarField& f, const Point& x);

// An H-valued field X -> H, used for vector semigroups and divergences.
// Values are HVectors in v-coordinates.
using HField = std::function<HVector(const Point&)>;

}  // namespace gaussbv
