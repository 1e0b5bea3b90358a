// SPDX-License-Identifier: Apache-2.0
#include "homesh/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace homesh {

namespace {

// 1D Gauss-Legendre nodes/weights on [0,1]. Newton iteration on P_n from
// the Chebyshev initial guess.
void gauss_legendre_1d(int n, std::vector<double>& pts, std::vector<double>& wts) {
  pts.resize(n);
  wts.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // Node i counts from the positive end; store ascending on [0,1].
    pts[n - 1 - i] = 0.5 * (x + 1.0);
    wts[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n == 1) {
    pts[0] = 0.5;
    wts[0] = 1.0;
  }
}

}  // namespace

QuadratureRule gauss_legendre_rule(int points_per_dim, int dim) {
  if (points_per_dim < 1)
    throw std::invalid_argument("gauss_legendre_rule: points_per_dim must be >= 1");
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("gauss_legendre_rule: dim must be 2 or 3");

  std::vector<double> p1, w1;
  gauss_legendre_1d(points_per_dim, p1, w1);

  QuadratureRule rule;
  rule.dim = dim;
  const int q = points_per_dim;
  const int nz = dim == 3 ? q : 1;
  for (int iz = 0; iz < nz; ++iz) {
    for (int iy = 0; iy < q; ++iy) {
      for (int ix = 0; ix < q; ++ix) {
        Vec pt = Vec::zero(dim);
        pt[0] = p1[ix];
        pt[1] = p1[iy];
        double w = w1[ix] * w1[iy];
        if (dim == 3) {
          pt[2] = p1[iz];
          w *= w1[iz];
        }
        rule.points.push_back(pt);
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

}  // namespace homesh
