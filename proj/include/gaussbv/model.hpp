#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gaussbv {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point of X written in the eigenbasis {v_i} of the covariance.
using Point = Vec;

// An element of the Cameron-Martin space H, stored by its v-coordinates.
// The H inner product weights coordinate i by 1/lambda_i, so these vectors
// must never be mixed with Euclidean gradients without going through the
// model.
struct HVector {
  Vec coords;

  HVector() = default;
  explicit HVector(Vec c) : coords(std::move(c)) {}
  static HVector zero(Eigen::Index d) { return HVector(Vec::Zero(d)); }
  Eigen::Index size() const { return coords.size(); }
  double operator[](Eigen::Index i) const { return coords[i]; }
};

// Centered non-degenerate Gaussian on R^d with diagonal covariance
// diag(lambda_1 >= ... >= lambda_d). Models the truncation of the
// infinite-dimensional measure to its leading d eigendirections.
class GaussianModel {
 public:
  explicit GaussianModel(std::vector<double> eigenvalues);

  // lambda_i = lambda1 * ratio^i, i = 0..dim-1.
  static GaussianModel geometric(int dim, double lambda1, double ratio);

  int dim() const { return static_cast<int>(lambda_.size()); }
  const Vec& eigenvalues() const { return lambda_; }
  const Vec& sqrt_eigenvalues() const { return sqrt_lambda_; }
  double lambda(int i) const { return lambda_[i]; }
  double lambda_max() const { return lambda_[0]; }
  double lambda_min() const { return lambda_[dim() - 1]; }
  double trace() const { return lambda_.sum(); }

  double h_inner(const HVector& h, const HVector& k) const;
  double h_norm(const HVector& h) const;
  double h_norm_sq(const Vec& v_coords) const;

  // D_H f = Q grad f.
  HVector h_gradient_from(const Vec& euclidean_grad) const;

  // Coordinates with respect to the orthonormal basis e_i = sqrt(lambda_i) v_i.
  Vec to_orthonormal(const HVector& h) const;
  HVector from_orthonormal(const Vec& e_coords) const;

  // An operator on H given as a matrix acting on v-coordinates, converted
  // to the symmetric matrix in the orthonormal basis and back.
  Mat operator_to_orthonormal(const Mat& v_op) const;
  Mat operator_from_orthonormal(const Mat& e_op) const;

  // Hilbert-Schmidt norm of an H operator given in v-coordinates.
  double hs_norm(const Mat& v_op) const;

  // Throws InvalidArgument when a vector has the wrong length.
  void require_dim(Eigen::Index n, const char* what) const;

 private:
  Vec lambda_;
  Vec sqrt_lambda_;
};

}  // namespace gaussbv
