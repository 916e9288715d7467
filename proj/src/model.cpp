#include "gaussbv/model.hpp"

#include <cmath>
#include <string>

#include "gaussbv/error.hpp"

namespace gaussbv {

GaussianModel::GaussianModel(std::vector<double> eigenvalues) {
  if (eigenvalues.empty()) throw InvalidArgument("model needs at least one eigenvalue");
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues[i];
    if (!(l > 0.0) || !std::isfinite(l))
      throw InvalidArgument("eigenvalue " + std::to_string(i) + " must be positive and finite");
    if (i > 0 && l > eigenvalues[i - 1])
      throw InvalidArgument("eigenvalues must be non-increasing");
  }
  lambda_ = Eigen::Map<const Vec>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
  sqrt_lambda_ = lambda_.cwiseSqrt();
}

GaussianModel GaussianModel::geometric(int dim, double lambda1, double ratio) {
  if (dim < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw InvalidArgument("ratio must lie in (0, 1]");
  std::vector<double> l(static_cast<std::size_t>(dim));
  double v = lambda1;
  for (auto& x : l) {
    x = v;
    v *= ratio;
  }
  return GaussianModel(std::move(l));
}

void GaussianModel::require_dim(Eigen::Index n, const char* what) const {
  if (n != lambda_.size())
    throw InvalidArgument(std::string(what) + ": expected dimension " + std::to_string(lambda_.size()) +
                          ", got " + std::to_string(n));
}

double GaussianModel::h_inner(const HVector& h, const HVector& k) const {
  require_dim(h.size(), "h_inner");
  require_dim(k.size(), "h_inner");
  return (h.coords.array() * k.coords.array() / lambda_.array()).sum();
}

double GaussianModel::h_norm_sq(const Vec& v) const { return (v.array().square() / lambda_.array()).sum(); }

double GaussianModel::h_norm(const HVector& h) const {
  require_dim(h.size(), "h_norm");
  return std::sqrt(h_norm_sq(h.coords));
}

HVector GaussianModel::h_gradient_from(const Vec& g) const {
  require_dim(g.size(), "h_gradient_from");
  return HVector(lambda_.cwiseProduct(g));
}

Vec GaussianModel::to_orthonormal(const HVector& h) const { return h.coords.cwiseQuotient(sqrt_lambda_); }

HVector GaussianModel::from_orthonormal(const Vec& e) const { return HVector(e.cwiseProduct(sqrt_lambda_)); }

Mat GaussianModel::operator_to_orthonormal(const Mat& v_op) const {
  return sqrt_lambda_.cwiseInverse().asDiagonal() * v_op * sqrt_lambda_.asDiagonal();
}

Mat GaussianModel::operator_from_orthonormal(const Mat& e_op) const {
  return sqrt_lambda_.asDiagonal() * e_op * sqrt_lambda_.cwiseInverse().asDiagonal();
}

double GaussianModel::hs_norm(const Mat& v_op) const { return operator_to_orthonormal(v_op).norm(); }

}  // namespace gaussbv
