// SPDX-License-Identifier: Apache-2.0
#include "homesh/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homesh {

namespace {

// Legendre polynomial P_k and derivative P_k' at x via the three-term
// recurrence.
void legendre(int k, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (k == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int n = 1; n < k; ++n) {
    const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = k * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

std::vector<double> gauss_lobatto_nodes(int degree) {
  if (degree < 1) throw std::invalid_argument("gauss_lobatto_nodes: degree must be >= 1");
  const int k = degree;
  std::vector<double> x(k + 1);
  x[0] = -1.0;
  x[k] = 1.0;
  // Interior nodes are the roots of P_k'. Newton iteration from the
  // Chebyshev-Lobatto guess; the update uses (1-x^2)P_k'' = 2xP_k' - k(k+1)P_k.
  for (int i = 1; i < k; ++i) {
    double t = std::cos(M_PI * (k - i) / k);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(k, t, p, dp);
      const double f = (1.0 - t * t) * dp;
      const double df = -static_cast<double>(k) * (k + 1.0) * p;
      const double step = f / df;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = t;
  }
  std::sort(x.begin(), x.end());
  // Map [-1,1] -> [0,1]; pin the midpoint so even degrees hit 0.5 exactly.
  std::vector<double> out(k + 1);
  for (int i = 0; i <= k; ++i) {
    out[i] = 0.5 * (x[i] + 1.0);
    if (std::abs(x[i]) < 1e-14) out[i] = 0.5;
  }
  out[0] = 0.0;
  out[k] = 1.0;
  return out;
}

void lagrange_basis_1d(const std::vector<double>& nodes, double t,
                       double* values, double* derivs) {
  const int n = static_cast<int>(nodes.size());
  for (int j = 0; j < n; ++j) {
    double denom = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) denom *= nodes[j] - nodes[m];
    const double wj = 1.0 / denom;

    double val = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) val *= t - nodes[m];
    values[j] = val * wj;

    double der = 0.0;
    for (int s = 0; s < n; ++s) {
      if (s == j) continue;
      double prod = 1.0;
      for (int m = 0; m < n; ++m)
        if (m != j && m != s) prod *= t - nodes[m];
      der += prod;
    }
    derivs[j] = der * wj;
  }
}

ShapeEval shape_functions(int degree, int dim, const Vec& ref_point) {
  if (degree < 1) throw std::invalid_argument("shape_functions: degree must be >= 1");
  if (dim != 2 && dim != 3) throw std::invalid_argument("shape_functions: dim must be 2 or 3");

  const auto nodes = gauss_lobatto_nodes(degree);
  const int n1 = degree + 1;

  // 1D values/derivatives per axis.
  std::vector<double> v(static_cast<std::size_t>(dim) * n1), d(static_cast<std::size_t>(dim) * n1);
  for (int a = 0; a < dim; ++a)
    lagrange_basis_1d(nodes, ref_point[a], &v[static_cast<std::size_t>(a) * n1],
                      &d[static_cast<std::size_t>(a) * n1]);

  const int nshapes = dim == 2 ? n1 * n1 : n1 * n1 * n1;
  ShapeEval out;
  out.values.resize(nshapes);
  out.gradients.assign(nshapes, Vec::zero(dim));

  int idx = 0;
  const int nz = dim == 3 ? n1 : 1;
  for (int iz = 0; iz < nz; ++iz) {
    for (int iy = 0; iy < n1; ++iy) {
      for (int ix = 0; ix < n1; ++ix, ++idx) {
        const double vx = v[ix], vy = v[n1 + iy];
        const double dx = d[ix], dy = d[n1 + iy];
        if (dim == 2) {
          out.values[idx] = vx * vy;
          out.gradients[idx][0] = dx * vy;
          out.gradients[idx][1] = vx * dy;
        } else {
          const double vz = v[2 * n1 + iz], dz = d[2 * n1 + iz];
          out.values[idx] = vx * vy * vz;
          out.gradients[idx][0] = dx * vy * vz;
          out.gradients[idx][1] = vx * dy * vz;
          out.gradients[idx][2] = vx * vy * dz;
        }
      }
    }
  }
  return out;
}

BasisTable::BasisTable(int degree, int dim, const std::vector<Vec>& points)
    : degree_(degree), dim_(dim), num_points_(static_cast<int>(points.size())) {
  const int n1 = degree + 1;
  num_shapes_ = dim == 2 ? n1 * n1 : n1 * n1 * n1;
  values_.resize(static_cast<std::size_t>(num_points_) * num_shapes_);
  grads_.resize(static_cast<std::size_t>(num_points_) * num_shapes_ * dim_);
  for (int q = 0; q < num_points_; ++q) {
    const ShapeEval se = shape_functions(degree, dim, points[static_cast<std::size_t>(q)]);
    for (int i = 0; i < num_shapes_; ++i) {
      values_[static_cast<std::size_t>(q * num_shapes_ + i)] = se.values[static_cast<std::size_t>(i)];
      for (int a = 0; a < dim_; ++a)
        grads_[static_cast<std::size_t>((q * num_shapes_ + i) * dim_ + a)] =
            se.gradients[static_cast<std::size_t>(i)][a];
    }
  }
}

}  // namespace homesh
