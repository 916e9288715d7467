#include "gaussbv/field.hpp"

#include <cmath>

#include "gaussbv/error.hpp"

namespace gaussbv {

ScalarField::ScalarField(ValueFn value, GradientFn gradient, HessianFn hessian)
    : value_(std::move(value)), gradient_(std::move(gradient)), hessian_(std::move(hessian)) {
  if (!value_) throw InvalidArgument("scalar field needs a value function");
}

ScalarField ScalarField::constant(double c) {
  ScalarField f([c](const Point&) { return c; }, [](const Point& x) { return Vec::Zero(x.size()).eval(); },
                [](const Point& x) { return Mat::Zero(x.size(), x.size()).eval(); });
  f.sup_abs_ = std::abs(c);
  f.lipschitz_ = true;
  f.name_ = "constant";
  return f;
}

ScalarField ScalarField::linear(Vec a, double b) {
  ScalarField f([a, b](const Point& x) { return a.dot(x) + b; }, [a](const Point&) { return a; },
                [n = a.size()](const Point&) { return Mat::Zero(n, n).eval(); });
  f.lipschitz_ = true;
  f.name_ = "linear";
  return f;
}

ScalarField ScalarField::indicator(HalfSpaceIndicator e) {
  if (!(e.a.norm() > 0.0)) throw InvalidArgument("half-space normal must be non-zero");
  ScalarField f([a = e.a, c = e.c](const Point& x) { return a.dot(x) < c ? 1.0 : 0.0; });
  f.indicator_ = std::move(e);
  f.sup_abs_ = 1.0;
  f.name_ = "indicator";
  return f;
}

Vec finite_difference_gradient(const ScalarField::ValueFn& f, const Point& x) {
  Vec g(x.size());
  Point y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat finite_difference_hessian(const std::function<Vec(const Point&)>& grad, const Point& x) {
  const Eigen::Index d = x.size();
  Mat h(d, d);
  Point y = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double s = 1e-5 * std::max(1.0, std::abs(x[j]));
    y[j] = x[j] + s;
    const Vec gp = grad(y);
    y[j] = x[j] - s;
    const Vec gm = grad(y);
    y[j] = x[j];
    h.col(j) = (gp - gm) / (2.0 * s);
  }
  return 0.5 * (h + h.transpose());
}

Vec ScalarField::gradient(const Point& x) const {
  if (gradient_) return gradient_(x);
  if (indicator_) throw InvalidArgument("indicator fields have no pointwise gradient; use mollified_gradient");
  return finite_difference_gradient(value_, x);
}

Mat ScalarField::hessian(const Point& x) const {
  if (hessian_) return hessian_(x);
  return finite_difference_hessian([this](const Point& y) { return gradient(y); }, x);
}

namespace {
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
}  // namespace

double ScalarField::mollified_value(const Point& x, double delta) const {
  if (!indicator_ || !(delta > 0.0)) return value_(x);
  const double s = delta * indicator_->a.norm();
  return normal_cdf((indicator_->c - indicator_->a.dot(x)) / s);
}

Vec ScalarField::mollified_gradient(const Point& x, double delta) const {
  if (!indicator_) return gradient(x);
  if (!(delta > 0.0)) throw InvalidArgument("mollification width must be positive");
  const double s = delta * indicator_->a.norm();
  return (-normal_pdf((indicator_->c - indicator_->a.dot(x)) / s) / s) * indicator_->a;
}

ScalarField& ScalarField::set_bounded(double sup_abs) {
  sup_abs_ = sup_abs;
  return *this;
}
ScalarField& ScalarField::set_lipschitz(bool v) {
  lipschitz_ = v;
  return *this;
}
ScalarField& ScalarField::set_name(std::string name) {
  name_ = std::move(name);
  return *this;
}

HVector h_gradient(const GaussianModel& model, const ScalarField& f, const Point& x) {
  model.require_dim(x.size(), "h_gradient");
  return model.h_gradient_from(f.gradient(x));
}

}  // namespace gaussbv
