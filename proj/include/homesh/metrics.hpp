// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <stdexcept>

#include "homesh/linalg.hpp"

namespace homesh {

/// Pointwise quality metrics of the weighted Jacobian T = A W^{-1}.
///   Shape2      mu2 = |T|^2 / (2 det T) - 1       (2D only; shape)
///   ShapeSize7  mu7 = |T - T^{-t}|^2              (shape + size)
///   ShapeSize9  mu9 = det T * |T - T^{-t}|^2      (shape + size)
/// All three vanish exactly when T = I and diverge as det T -> 0+, which is
/// what guards the line search against element inversion.
enum class MetricId { Shape2, ShapeSize7, ShapeSize9 };

/// Sentinel for barrier violations; the solver orders it like +infinity.
inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

inline const char* metric_name(MetricId id) {
  switch (id) {
    case MetricId::Shape2: return "mu2";
    case MetricId::ShapeSize7: return "mu7";
    case MetricId::ShapeSize9: return "mu9";
  }
  return "?";
}

inline void check_metric_dim(MetricId id, int dim) {
  if (id == MetricId::Shape2 && dim != 2)
    throw std::invalid_argument("mu2 is restricted to 2D");
}

/// mu(T). Returns kInfeasible when the barrier is violated (det T <= 0 for
/// mu2/mu9, singular T for mu7).
inline double eval_metric(MetricId id, const Mat& T) {
  check_metric_dim(id, T.dim());
  const double tau = T.det();
  switch (id) {
    case MetricId::Shape2: {
      if (tau <= 0.0) return kInfeasible;
      return T.frob2() / (2.0 * tau) - 1.0;
    }
    case MetricId::ShapeSize7: {
      if (tau == 0.0) return kInfeasible;
      const Mat Tit = T.inverse().transpose();
      return (T - Tit).frob2();
    }
    case MetricId::ShapeSize9: {
      if (tau <= 0.0) return kInfeasible;
      const Mat Tit = T.inverse().transpose();
      return tau * (T - Tit).frob2();
    }
  }
  return kInfeasible;
}

/// d mu / d T. Throws std::domain_error at barrier-infeasible T.
inline Mat metric_grad(MetricId id, const Mat& T) {
  check_metric_dim(id, T.dim());
  const double tau = T.det();
  const bool bad = id == MetricId::ShapeSize7 ? tau == 0.0 : tau <= 0.0;
  if (bad) throw std::domain_error("metric_grad: infeasible T");

  switch (id) {
    case MetricId::Shape2: {
      // d/dT [|T|^2/(2 tau)] = T/tau - (|T|^2 / (2 tau)) T^{-t}
      const Mat Tit = T.inverse().transpose();
      return T.scaled(1.0 / tau) - Tit.scaled(T.frob2() / (2.0 * tau));
    }
    case MetricId::ShapeSize7: {
      // With S = T - T^{-t}:  d mu7 = 2 S + 2 T^{-t} S^t T^{-t}.
      const Mat Ti = T.inverse();
      const Mat Tit = Ti.transpose();
      const Mat S = T - Tit;
      return S.scaled(2.0) + (Tit * S.transpose() * Tit).scaled(2.0);
    }
    case MetricId::ShapeSize9: {
      // mu9 = tau * mu7; d tau = tau T^{-t}.
      const Mat Ti = T.inverse();
      const Mat Tit = Ti.transpose();
      const Mat S = T - Tit;
      const double mu7 = S.frob2();
      const Mat dmu7 = S.scaled(2.0) + (Tit * S.transpose() * Tit).scaled(2.0);
      return dmu7.scaled(tau) + Tit.scaled(tau * mu7);
    }
  }
  throw std::domain_error("metric_grad: unknown metric");
}

}  // namespace homesh
