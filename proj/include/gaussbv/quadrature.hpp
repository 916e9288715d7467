#pragma once

#include <functional>
#include <vector>

#include "gaussbv/model.hpp"

namespace gaussbv {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

// Gauss-Hermite rule for the standard normal density (weights sum to 1).
QuadratureRule gauss_hermite(int order);

// Gauss-Legendre rule on [0, 1].
QuadratureRule gauss_legendre(int order);

// Iterates the tensor product of a 1-d rule over d coordinates.
void for_each_tensor_node(int dim, const QuadratureRule& rule,
                          const std::function<void(const Vec& z, double w)>& fn);

}  // namespace gaussbv
