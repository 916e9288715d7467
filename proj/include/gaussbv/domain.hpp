#pragma once

#include <string>
#include <utility>

#include "gaussbv/model.hpp"

namespace gaussbv {

// Convex open set Omega with closed-form H-metric distance data.
class ConvexDomain {
 public:
  enum class Kind { WholeSpace, HalfSpace, Slab, HBall, HEllipsoid, EuclideanBall };

  static ConvexDomain whole_space(int dim);
  // {x : <a, x> < c}.
  static ConvexDomain half_space(Vec a, double c);
  // {x : lo < <a, x> < hi}.
  static ConvexDomain slab(Vec a, double lo, double hi);
  // {x : |x - center|_H < r}.
  static ConvexDomain h_ball(Vec center, double r);
  // {x : sum_i (x_i - c_i)^2 / (lambda_i s_i^2) < 1}, semi-axes s_i in H units.
  static ConvexDomain h_ellipsoid(Vec center, Vec semi_axes);
  // {x : |x - center| < r}, Euclidean norm in v-coordinates.
  static ConvexDomain euclidean_ball(Vec center, double r);

  Kind kind() const { return kind_; }
  std::string name() const;
  int dim() const { return static_cast<int>(dim_); }
  bool is_whole_space() const { return kind_ == Kind::WholeSpace; }

  bool contains(const GaussianModel& model, const Point& x) const;

  // H-metric projection onto the closure.
  Point projection_h(const GaussianModel& model, const Point& x) const;
  double distance_h(const GaussianModel& model, const Point& x) const;
  // D_H d^2 = 2 (x - pi(x)).
  HVector grad_h_dist_sq(const GaussianModel& model, const Point& x) const;
  // D_H^2 d^2 as a v-operator (matrix acting on HVector coordinates).
  Mat hess_h_dist_sq(const GaussianModel& model, const Point& x) const;
  // The same operator in the orthonormal basis {e_i}; symmetric.
  Mat hess_h_dist_sq_orthonormal(const GaussianModel& model, const Point& x) const;

  const Vec& normal() const { return a_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return r_; }
  const Vec& semi_axes() const { return axes_; }

  // The 1-d interval (lo, hi) when dim() == 1, with infinite ends allowed.
  std::pair<double, double> interval_1d(const GaussianModel& model) const;

 private:
  // Generalized ellipsoid sum_i w_i (x_i - c_i)^2 <= 1. Weights depend on the
  // model only for the H-ball and H-ellipsoid.
  Vec ellipsoid_weights(const GaussianModel& model) const;
  Point project_ellipsoid(const GaussianModel& model, const Point& x) const;
  void check(const GaussianModel& model, const Point& x) const;

  Kind kind_ = Kind::WholeSpace;
  Eigen::Index dim_ = 0;
  Vec a_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  Vec center_;
  double r_ = 0.0;
  Vec axes_;
};

}  // namespace gaussbv
