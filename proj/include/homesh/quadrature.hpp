// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "homesh/linalg.hpp"

namespace homesh {

/// Tensor-product quadrature on the reference cube [0,1]^dim.
/// Weights sum to 1, the reference volume.
struct QuadratureRule {
  int dim = 0;
  std::vector<Vec> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Tensor-product Gauss-Legendre rule, exact per dimension for polynomial
/// degree <= 2*points_per_dim - 1.
QuadratureRule gauss_legendre_rule(int points_per_dim, int dim);

}  // namespace homesh
