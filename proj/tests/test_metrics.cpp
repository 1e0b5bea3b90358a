// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "homesh/metrics.hpp"

using namespace homesh;

namespace {

Mat random_rotation_2d(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  const double t = u(rng);
  Mat q(2);
  q(0, 0) = std::cos(t);
  q(0, 1) = -std::sin(t);
  q(1, 0) = std::sin(t);
  q(1, 1) = std::cos(t);
  return q;
}

Mat random_rotation_3d(std::mt19937_64& rng) {
  // Normalized quaternion to rotation matrix.
  std::normal_distribution<double> n(0.0, 1.0);
  double q[4] = {n(rng), n(rng), n(rng), n(rng)};
  double s = 0.0;
  for (double v : q) s += v * v;
  s = std::sqrt(s);
  for (double& v : q) v /= s;
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat r(3);
  r(0, 0) = 1 - 2 * (y * y + z * z);
  r(0, 1) = 2 * (x * y - w * z);
  r(0, 2) = 2 * (x * z + w * y);
  r(1, 0) = 2 * (x * y + w * z);
  r(1, 1) = 1 - 2 * (x * x + z * z);
  r(1, 2) = 2 * (y * z - w * x);
  r(2, 0) = 2 * (x * z - w * y);
  r(2, 1) = 2 * (y * z + w * x);
  r(2, 2) = 1 - 2 * (x * x + y * y);
  return r;
}

// Random T with positive determinant, biased toward well-conditioned shapes.
Mat random_feasible(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Mat t = Mat::identity(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) t(i, j) += 0.6 * u(rng);
    if (t.det() > 0.05) return t;
  }
}

}  // namespace

TEST_CASE("metric identities at I and simple diagonals") {
  const Mat I2 = Mat::identity(2);
  CHECK(eval_metric(MetricId::Shape2, I2) == 0.0);
  CHECK(eval_metric(MetricId::ShapeSize7, I2) == 0.0);
  CHECK(eval_metric(MetricId::ShapeSize9, I2) == 0.0);
  const Mat I3 = Mat::identity(3);
  CHECK(eval_metric(MetricId::ShapeSize7, I3) == 0.0);
  CHECK(eval_metric(MetricId::ShapeSize9, I3) == 0.0);

  // mu2(diag(2,1)) = 5/4 - 1.
  CHECK(eval_metric(MetricId::Shape2, Mat::diag(2.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-15));

  // mu9(2I) in 2D: tau = 4, T - T^{-t} = 1.5 I, value 4 * 4.5 = 18.
  CHECK(eval_metric(MetricId::ShapeSize9, Mat::diag(2.0, 2.0)) == doctest::Approx(18.0).epsilon(1e-14));

  // mu2 is 2D-only by design.
  CHECK_THROWS_AS(eval_metric(MetricId::Shape2, I3), std::invalid_argument);
}

TEST_CASE("barrier sentinel for infeasible T") {
  const Mat flipped = Mat::diag(-1.0, 1.0);
  CHECK(eval_metric(MetricId::Shape2, flipped) == kInfeasible);
  CHECK(eval_metric(MetricId::ShapeSize9, flipped) == kInfeasible);
  Mat singular(2);
  singular(0, 0) = 1.0;
  CHECK(eval_metric(MetricId::ShapeSize7, singular) == kInfeasible);
  CHECK_THROWS_AS(metric_grad(MetricId::Shape2, flipped), std::domain_error);
}

TEST_CASE("metric gradients: closed forms and finite differences") {
  // Identity is the minimizer of mu2.
  const Mat g0 = metric_grad(MetricId::Shape2, Mat::identity(2));
  CHECK(std::sqrt(g0.frob2()) < 1e-15);

  const Mat g1 = metric_grad(MetricId::Shape2, Mat::diag(2.0, 1.0));
  CHECK(g1(0, 0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(g1(1, 1) == doctest::Approx(-0.75).epsilon(1e-14));
  CHECK(std::abs(g1(0, 1)) < 1e-15);

  std::mt19937_64 rng(123);
  const double step = 1e-6;
  for (int dim = 2; dim <= 3; ++dim) {
    for (MetricId id : {MetricId::Shape2, MetricId::ShapeSize7, MetricId::ShapeSize9}) {
      if (id == MetricId::Shape2 && dim == 3) continue;
      for (int trial = 0; trial < 100; ++trial) {
        const Mat T = random_feasible(rng, dim);
        const Mat G = metric_grad(id, T);
        double scale = 0.0;
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(G(i, j)));
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            Mat Tp = T, Tm = T;
            Tp(i, j) += step;
            Tm(i, j) -= step;
            const double fd = (eval_metric(id, Tp) - eval_metric(id, Tm)) / (2.0 * step);
            CHECK(std::abs(G(i, j) - fd) <= 1e-6 * std::max({std::abs(fd), scale * 1e-3, 1e-9}));
          }
      }
    }
  }
}

TEST_CASE("metric invariance properties") {
  std::mt19937_64 rng(99);

  // Nonnegativity on random feasible samples.
  for (int dim = 2; dim <= 3; ++dim)
    for (MetricId id : {MetricId::Shape2, MetricId::ShapeSize7, MetricId::ShapeSize9}) {
      if (id == MetricId::Shape2 && dim == 3) continue;
      for (int trial = 0; trial < 10000; ++trial) {
        const double v = eval_metric(id, random_feasible(rng, dim));
        CHECK(v >= -1e-14);
      }
    }

  // mu2(c Q) = 0 for any scale and rotation in 2D.
  for (int trial = 0; trial < 50; ++trial) {
    const Mat q = random_rotation_2d(rng);
    for (double c : {0.1, 1.0, 10.0}) CHECK(std::abs(eval_metric(MetricId::Shape2, q.scaled(c))) < 1e-13);
  }

  // Orientation invariance mu(QT) = mu(T).
  for (int trial = 0; trial < 100; ++trial) {
    for (int dim = 2; dim <= 3; ++dim) {
      const Mat T = random_feasible(rng, dim);
      const Mat Q = dim == 2 ? random_rotation_2d(rng) : random_rotation_3d(rng);
      for (MetricId id : {MetricId::Shape2, MetricId::ShapeSize7, MetricId::ShapeSize9}) {
        if (id == MetricId::Shape2 && dim == 3) continue;
        const double a = eval_metric(id, T);
        const double b = eval_metric(id, Q * T);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
      }
    }
  }

  // mu2 volume invariance in 2D.
  for (int trial = 0; trial < 100; ++trial) {
    const Mat T = random_feasible(rng, 2);
    const double base = eval_metric(MetricId::Shape2, T);
    for (double c : {0.1, 10.0})
      CHECK(std::abs(eval_metric(MetricId::Shape2, T.scaled(c)) - base) <= 1e-12 * std::max(1.0, base));
  }
}
