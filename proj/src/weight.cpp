#include "gaussbv/weight.hpp"

#include <cmath>

#include "gaussbv/error.hpp"

namespace gaussbv {

ConvexWeight ConvexWeight::zero(int dim) {
  if (dim < 1) throw InvalidArgument("weight dimension must be >= 1");
  ConvexWeight w;
  w.dim_ = dim;
  return w;
}

ConvexWeight ConvexWeight::quadratic(Vec k) {
  if (k.size() < 1) throw InvalidArgument("quadratic weight needs coefficients");
  for (Eigen::Index i = 0; i < k.size(); ++i)
    if (!(k[i] >= 0.0) || !std::isfinite(k[i])) throw InvalidArgument("quadratic coefficients must be >= 0");
  ConvexWeight w;
  w.kind_ = Kind::Quadratic;
  w.dim_ = static_cast<int>(k.size());
  w.k_ = std::move(k);
  return w;
}

ConvexWeight ConvexWeight::smoothed_norm(int dim, double kappa) {
  if (dim < 1) throw InvalidArgument("weight dimension must be >= 1");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be >= 0");
  ConvexWeight w;
  w.kind_ = Kind::SmoothedNorm;
  w.dim_ = dim;
  w.kappa_ = kappa;
  return w;
}

ConvexWeight ConvexWeight::custom(int dim, CustomSpec spec) {
  if (!spec.value || !spec.gradient || !spec.hessian)
    throw InvalidArgument("custom weight needs value, gradient and hessian");
  ConvexWeight w;
  w.kind_ = Kind::Custom;
  w.dim_ = dim;
  w.custom_ = std::move(spec);
  return w;
}

std::string ConvexWeight::name() const {
  switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Quadratic: return "quadratic";
    case Kind::SmoothedNorm: return "smoothed-norm";
    case Kind::Custom: return "custom";
  }
  return "?";
}

double ConvexWeight::value(const Point& x) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Quadratic: return 0.5 * (k_.array() * x.array().square()).sum();
    case Kind::SmoothedNorm: return kappa_ * std::sqrt(1.0 + x.squaredNorm());
    case Kind::Custom: return custom_.value(x);
  }
  return 0.0;
}

void ConvexWeight::gradient(const Point& x, Eigen::Ref<Vec> out) const {
  switch (kind_) {
    case Kind::Zero: out.setZero(); return;
    case Kind::Quadratic: out = k_.cwiseProduct(x); return;
    case Kind::SmoothedNorm: out = (kappa_ / std::sqrt(1.0 + x.squaredNorm())) * x; return;
    case Kind::Custom: out = custom_.gradient(x); return;
  }
}

Vec ConvexWeight::gradient(const Point& x) const {
  Vec g(x.size());
  gradient(x, g);
  return g;
}

Mat ConvexWeight::hessian(const Point& x) const {
  const Eigen::Index d = x.size();
  switch (kind_) {
    case Kind::Zero: return Mat::Zero(d, d);
    case Kind::Quadratic: return k_.asDiagonal();
    case Kind::SmoothedNorm: {
      const double r2 = 1.0 + x.squaredNorm();
      const double r = std::sqrt(r2);
      return (kappa_ / r) * (Mat::Identity(d, d) - x * x.transpose() / r2);
    }
    case Kind::Custom: return custom_.hessian(x);
  }
  return Mat::Zero(d, d);
}

void ConvexWeight::add_h_hessian(const GaussianModel& model, const Point& x, Eigen::Ref<Mat> out) const {
  switch (kind_) {
    case Kind::Zero: return;
    case Kind::Quadratic: out.diagonal() += model.eigenvalues().cwiseProduct(k_); return;
    default: out += model.eigenvalues().asDiagonal() * hessian(x); return;
  }
}

double ConvexWeight::h_lip(const GaussianModel& model) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Quadratic: return model.eigenvalues().cwiseProduct(k_).maxCoeff();
    case Kind::SmoothedNorm: return kappa_ * model.lambda_max();
    case Kind::Custom: return custom_.h_lip;
  }
  return 0.0;
}

double ConvexWeight::lower_bound() const {
  switch (kind_) {
    case Kind::SmoothedNorm: return kappa_;
    case Kind::Custom: return custom_.lower_bound;
    default: return 0.0;
  }
}

}  // namespace gaussbv
