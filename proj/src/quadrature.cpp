#include "gaussbv/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gaussbv/error.hpp"

namespace gaussbv {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components times the total mass.
QuadratureRule golub_welsch(const Vec& offdiag, int order, double mass) {
  Mat jac = Mat::Zero(order, order);
  for (int k = 0; k + 1 < order; ++k) jac(k, k + 1) = jac(k + 1, k) = offdiag[k];
  Eigen::SelfAdjointEigenSolver<Mat> es(jac);
  if (es.info() != Eigen::Success) throw NumericalError("quadrature eigen solve failed");
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) {
    r.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    r.weights[static_cast<std::size_t>(k)] = mass * v0 * v0;
  }
  return r;
}

}  // namespace

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("quadrature order must be >= 1");
  if (order == 1) return {{0.0}, {1.0}};
  Vec off(order - 1);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  QuadratureRule r = golub_welsch(off, order, 1.0);
  // Symmetrize to remove eigen-solver noise.
  const std::size_t n = r.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (r.nodes[n - 1 - i] - r.nodes[i]);
    const double w = 0.5 * (r.weights[n - 1 - i] + r.weights[i]);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  double total = 0.0;
  for (double w : r.weights) total += w;
  for (double& w : r.weights) w /= total;
  return r;
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw InvalidArgument("quadrature order must be >= 1");
  if (order == 1) return {{0.5}, {1.0}};
  Vec off(order - 1);
  for (int k = 1; k < order; ++k) {
    const double kk = static_cast<double>(k);
    off[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  QuadratureRule r = golub_welsch(off, order, 2.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r.nodes[i] = 0.5 * (r.nodes[i] + 1.0);
    r.weights[i] *= 0.5;
  }
  return r;
}

void for_each_tensor_node(int dim, const QuadratureRule& rule,
                          const std::function<void(const Vec& z, double w)>& fn) {
  if (dim < 1) throw InvalidArgument("tensor dimension must be >= 1");
  const std::size_t m = rule.size();
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  Vec z(dim);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      z[i] = rule.nodes[idx[static_cast<std::size_t>(i)]];
      w *= rule.weights[idx[static_cast<std::size_t>(i)]];
    }
    fn(z, w);
    int k = 0;
    while (k < dim && ++idx[static_cast<std::size_t>(k)] == m) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == dim) break;
  }
}

}  // namespace gaussbv
