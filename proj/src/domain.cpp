#include "gaussbv/domain.hpp"

#include <cmath>

#include "gaussbv/error.hpp"
#include "gaussbv/estimate.hpp"

namespace gaussbv {

namespace {
void require_positive_normal(const Vec& a) {
  if (a.size() < 1 || !(a.norm() > 0.0)) throw InvalidArgument("domain normal must be non-zero");
}
}  // namespace

ConvexDomain ConvexDomain::whole_space(int dim) {
  if (dim < 1) throw InvalidArgument("domain dimension must be >= 1");
  ConvexDomain d;
  d.dim_ = dim;
  return d;
}

ConvexDomain ConvexDomain::half_space(Vec a, double c) {
  require_positive_normal(a);
  ConvexDomain d;
  d.kind_ = Kind::HalfSpace;
  d.dim_ = a.size();
  d.a_ = std::move(a);
  d.lo_ = -kInf;
  d.hi_ = c;
  return d;
}

ConvexDomain ConvexDomain::slab(Vec a, double lo, double hi) {
  require_positive_normal(a);
  if (!(lo < hi)) throw InvalidArgument("slab needs lo < hi");
  ConvexDomain d;
  d.kind_ = Kind::Slab;
  d.dim_ = a.size();
  d.a_ = std::move(a);
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

ConvexDomain ConvexDomain::h_ball(Vec center, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  ConvexDomain d;
  d.kind_ = Kind::HBall;
  d.dim_ = center.size();
  d.center_ = std::move(center);
  d.r_ = r;
  return d;
}

ConvexDomain ConvexDomain::h_ellipsoid(Vec center, Vec semi_axes) {
  if (center.size() != semi_axes.size()) throw InvalidArgument("ellipsoid center/axes size mismatch");
  if (!(semi_axes.minCoeff() > 0.0)) throw InvalidArgument("ellipsoid semi-axes must be positive");
  ConvexDomain d;
  d.kind_ = Kind::HEllipsoid;
  d.dim_ = center.size();
  d.center_ = std::move(center);
  d.axes_ = std::move(semi_axes);
  return d;
}

ConvexDomain ConvexDomain::euclidean_ball(Vec center, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  ConvexDomain d;
  d.kind_ = Kind::EuclideanBall;
  d.dim_ = center.size();
  d.center_ = std::move(center);
  d.r_ = r;
  return d;
}

std::string ConvexDomain::name() const {
  switch (kind_) {
    case Kind::WholeSpace: return "whole-space";
    case Kind::HalfSpace: return "half-space";
    case Kind::Slab: return "slab";
    case Kind::HBall: return "h-ball";
    case Kind::HEllipsoid: return "h-ellipsoid";
    case Kind::EuclideanBall: return "euclidean-ball";
  }
  return "?";
}

void ConvexDomain::check(const GaussianModel& model, const Point& x) const {
  model.require_dim(x.size(), "domain point");
  if (dim_ != x.size()) throw InvalidArgument("domain dimension does not match point");
}

bool ConvexDomain::contains(const GaussianModel& model, const Point& x) const {
  check(model, x);
  switch (kind_) {
    case Kind::WholeSpace: return true;
    case Kind::HalfSpace: return a_.dot(x) < hi_;
    case Kind::Slab: {
      const double s = a_.dot(x);
      return lo_ < s && s < hi_;
    }
    case Kind::EuclideanBall:
    case Kind::HBall:
    case Kind::HEllipsoid: return ellipsoid_weights(model).dot((x - center_).cwiseAbs2()) < 1.0;
  }
  return false;
}

Vec ConvexDomain::ellipsoid_weights(const GaussianModel& model) const {
  switch (kind_) {
    case Kind::HBall: return (model.eigenvalues() * (r_ * r_)).cwiseInverse();
    case Kind::HEllipsoid: return (model.eigenvalues().cwiseProduct(axes_.cwiseAbs2())).cwiseInverse();
    case Kind::EuclideanBall: return Vec::Constant(dim_, 1.0 / (r_ * r_));
    default: throw InvalidArgument("not an ellipsoidal domain");
  }
}

// Minimizes sum (y_i - x_i)^2 / lambda_i subject to sum w_i (y_i - c_i)^2 <= 1.
// Stationarity gives y_i - c_i = (x_i - c_i) / (1 + mu lambda_i w_i) with
// mu >= 0 the root of g(mu) = sum w_i (x_i - c_i)^2 / (1 + mu lambda_i w_i)^2 - 1.
// g is convex and decreasing, so Newton from mu = 0 increases monotonically
// to the root; bisection guards against round-off.
Point ConvexDomain::project_ellipsoid(const GaussianModel& model, const Point& x) const {
  const Vec w = ellipsoid_weights(model);
  const Vec z = x - center_;
  const Vec z2w = w.cwiseProduct(z.cwiseAbs2());
  if (z2w.sum() <= 1.0) return x;
  const Vec lw = model.eigenvalues().cwiseProduct(w);
  auto g = [&](double mu, double* dg) {
    double v = -1.0, dv = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double q = 1.0 / (1.0 + mu * lw[i]);
      v += z2w[i] * q * q;
      dv += -2.0 * z2w[i] * lw[i] * q * q * q;
    }
    *dg = dv;
    return v;
  };
  double lo = 0.0;
  double hi = 1.0;
  double dg;
  while (g(hi, &dg) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("ellipsoid projection: multiplier bracket failed");
  }
  double mu = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double v = g(mu, &dg);
    if (std::abs(v) <= 1e-12) {
      return center_ + z.cwiseQuotient((lw * mu).array().matrix() + Vec::Ones(z.size()));
    }
    if (v > 0.0)
      lo = mu;
    else
      hi = mu;
    double next = mu - v / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  throw NumericalError("ellipsoid projection: Newton iteration did not converge");
}

Point ConvexDomain::projection_h(const GaussianModel& model, const Point& x) const {
  check(model, x);
  switch (kind_) {
    case Kind::WholeSpace: return x;
    case Kind::HalfSpace:
    case Kind::Slab: {
      const double s = a_.dot(x);
      double target = s;
      if (s > hi_) target = hi_;
      if (s < lo_) target = lo_;
      if (target == s) return x;
      const Vec qa = model.eigenvalues().cwiseProduct(a_);
      return x - qa * ((s - target) / a_.dot(qa));
    }
    case Kind::HBall: {
      const Vec z = x - center_;
      const double n = std::sqrt(model.h_norm_sq(z));
      if (n <= r_) return x;
      return center_ + z * (r_ / n);
    }
    case Kind::HEllipsoid:
    case Kind::EuclideanBall: return project_ellipsoid(model, x);
  }
  return x;
}

double ConvexDomain::distance_h(const GaussianModel& model, const Point& x) const {
  check(model, x);
  switch (kind_) {
    case Kind::WholeSpace: return 0.0;
    case Kind::HalfSpace:
    case Kind::Slab: {
      const double s = a_.dot(x);
      const double sigma = std::sqrt(a_.dot(model.eigenvalues().cwiseProduct(a_)));
      if (s > hi_) return (s - hi_) / sigma;
      if (s < lo_) return (lo_ - s) / sigma;
      return 0.0;
    }
    default: return std::sqrt(model.h_norm_sq(x - projection_h(model, x)));
  }
}

HVector ConvexDomain::grad_h_dist_sq(const GaussianModel& model, const Point& x) const {
  return HVector(2.0 * (x - projection_h(model, x)));
}

Mat ConvexDomain::hess_h_dist_sq(const GaussianModel& model, const Point& x) const {
  check(model, x);
  const Eigen::Index d = x.size();
  switch (kind_) {
    case Kind::WholeSpace: return Mat::Zero(d, d);
    case Kind::HalfSpace:
    case Kind::Slab: {
      const double s = a_.dot(x);
      if (s <= hi_ && s >= lo_) return Mat::Zero(d, d);
      const Vec qa = model.eigenvalues().cwiseProduct(a_);
      return (2.0 / a_.dot(qa)) * qa * a_.transpose();
    }
    case Kind::HBall: {
      const Vec z = x - center_;
      const double n = std::sqrt(model.h_norm_sq(z));
      if (n <= r_) return Mat::Zero(d, d);
      // pi = c + r z / |z|_H, D pi = (r/n)(I - z (Q^{-1} z)^T / n^2).
      const Vec qinv_z = z.cwiseQuotient(model.eigenvalues());
      return 2.0 * (Mat::Identity(d, d) - (r_ / n) * (Mat::Identity(d, d) - z * qinv_z.transpose() / (n * n)));
    }
    default: {
      const Vec w = ellipsoid_weights(model);
      if (w.dot((x - center_).cwiseAbs2()) <= 1.0) return Mat::Zero(d, d);
      Mat h(d, d);
      Point y = x;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
        y[j] = x[j] + step;
        const Vec gp = 2.0 * (y - projection_h(model, y));
        y[j] = x[j] - step;
        const Vec gm = 2.0 * (y - projection_h(model, y));
        y[j] = x[j];
        h.col(j) = (gp - gm) / (2.0 * step);
      }
      return h;
    }
  }
}

Mat ConvexDomain::hess_h_dist_sq_orthonormal(const GaussianModel& model, const Point& x) const {
  const Mat e = model.operator_to_orthonormal(hess_h_dist_sq(model, x));
  return 0.5 * (e + e.transpose());
}

std::pair<double, double> ConvexDomain::interval_1d(const GaussianModel& model) const {
  model.require_dim(dim_, "interval_1d");
  if (dim_ != 1) throw InvalidArgument("interval_1d needs a one-dimensional domain");
  const double inf = kInf;
  switch (kind_) {
    case Kind::WholeSpace: return {-inf, inf};
    case Kind::HalfSpace:
    case Kind::Slab: {
      const double a = a_[0];
      double lo = lo_ / a, hi = hi_ / a;
      if (a < 0) std::swap(lo, hi);
      return {lo, hi};
    }
    case Kind::HBall:
    case Kind::HEllipsoid:
    case Kind::EuclideanBall: {
      const double half = 1.0 / std::sqrt(ellipsoid_weights(model)[0]);
      return {center_[0] - half, center_[0] + half};
    }
  }
  return {-inf, inf};
}

}  // namespace gaussbv
