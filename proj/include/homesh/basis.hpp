// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "homesh/linalg.hpp"

namespace homesh {

/// Gauss-Lobatto interpolation nodes for degree k, mapped to [0,1].
/// Returns k+1 ascending values with exact endpoints 0 and 1.
std::vector<double> gauss_lobatto_nodes(int degree);

/// Values and first derivatives of the 1D Lagrange basis on the given
/// node set, evaluated at t. Output arrays must hold nodes.size() entries.
void lagrange_basis_1d(const std::vector<double>& nodes, double t,
                       double* values, double* derivs);

struct ShapeEval {
  std::vector<double> values;
  std::vector<Vec> gradients;
};

/// Tensor-product Lagrange shape functions on the reference cube [0,1]^dim
/// with Gauss-Lobatto node placement. Node order is lexicographic with the
/// first axis fastest: i = ix + (k+1)*iy (+ (k+1)^2*iz).
ShapeEval shape_functions(int degree, int dim, const Vec& ref_point);

/// Shape values and reference gradients precomputed at a fixed point set.
/// Flat layout so evaluation loops can run over raw pointers.
class BasisTable {
 public:
  BasisTable(int degree, int dim, const std::vector<Vec>& points);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int num_points() const { return num_points_; }
  int num_shapes() const { return num_shapes_; }

  double value(int q, int i) const {
    return values_[static_cast<std::size_t>(q * num_shapes_ + i)];
  }
  /// Pointer to the dim components of grad(shape i) at point q.
  const double* gradient(int q, int i) const {
    return &grads_[static_cast<std::size_t>((q * num_shapes_ + i) * dim_)];
  }
  const double* values_at(int q) const {
    return &values_[static_cast<std::size_t>(q * num_shapes_)];
  }

 private:
  int degree_;
  int dim_;
  int num_points_;
  int num_shapes_;
  std::vector<double> values_;
  std::vector<double> grads_;
};

}  // namespace homesh
