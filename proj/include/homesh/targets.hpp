// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "homesh/fields.hpp"
#include "homesh/mesh.hpp"
#include "homesh/quadrature.hpp"

namespace homesh {

/// Target Jacobians W, one per (element, quadrature point). det W and W^{-1}
/// are cached at insertion; every stored W must have positive determinant.
/// `volumetric` records whether the targets carry size information, which
/// selects the limiting-term normalization.
class TargetField {
 public:
  TargetField(int dim, int num_elements, int points_per_element, bool volumetric);

  int dim() const { return dim_; }
  int num_elements() const { return num_elements_; }
  int points_per_element() const { return points_per_element_; }
  bool volumetric() const { return volumetric_; }

  void set(int elem, int q, const Mat& W);

  const Mat& target(int elem, int q) const { return w_[index(elem, q)]; }
  const Mat& inverse(int elem, int q) const { return winv_[index(elem, q)]; }
  double det(int elem, int q) const { return detw_[index(elem, q)]; }

 private:
  std::size_t index(int elem, int q) const {
    return static_cast<std::size_t>(elem) * points_per_element_ + q;
  }
  int dim_;
  int num_elements_;
  int points_per_element_;
  bool volumetric_;
  std::vector<Mat> w_;
  std::vector<Mat> winv_;
  std::vector<double> detw_;
};

/// Rebuilds targets for the current node positions; invoked by the solver
/// after every accepted step when targets are lagged.
using TargetBuilder = std::function<TargetField(const Mesh& current)>;

/// W = I everywhere (shape only), or W = (V/N_E)^{1/d} I carrying the mean
/// element volume of mesh0 when with_size is set.
TargetField ideal_uniform_targets(const Mesh& mesh0, const QuadratureRule& rule, bool with_size);

/// 2D four-factor target: [volume][orientation][skew][aspect ratio] with
/// det W = size * sin(skew_angle).
Mat composed_target(double size, double orientation_angle, double skew_angle, double aspect_ratio);

/// Small local size s solving  V_g/s + (V - V_g)/(alpha s) = N_E  with
/// V_g = integral of g over mesh0. Computed once on the Lagrangian mesh.
double size_from_indicator(const Mesh& mesh0, const DiscreteField& g, double alpha,
                           const QuadratureRule& rule);

/// Isotropic size target W = [g s + (1 - g) alpha s]^{1/d} I.
Mat adaptive_size_target(double g_value, double s, double alpha, int dim);

/// Targets W(x) = adaptive_size_target(g(x), s, alpha) evaluated at the
/// quadrature points of `mesh`, where g lives on `mesh` and s was computed
/// on the Lagrangian mesh.
TargetField adaptive_size_targets(const Mesh& mesh, const DiscreteField& g, double s, double alpha,
                                  const QuadratureRule& rule);

/// Precomputed normalization for interface targets: the gradient-magnitude
/// scale and the size s are frozen on the Lagrangian mesh.
struct InterfaceScale {
  double max_grad_norm = 0.0;
  double size = 0.0;
  double alpha = 10.0;
};
InterfaceScale interface_scale(const Mesh& mesh0, const DiscreteField& eta,
                               const QuadratureRule& rule, double alpha = 10.0);

/// 2D interface-adapted targets from an indicator eta: aspect ratio from the
/// gradient component ratio (clamped to [1/8, 8]), size from the gradient
/// magnitude through the indicator size law, skew pi/2, no rotation.
TargetField interface_targets(const Mesh& mesh, const DiscreteField& eta,
                              const QuadratureRule& rule, const InterfaceScale& scale);

/// Convenience overload computing the scale on the same mesh (the
/// Lagrangian-mesh call).
TargetField interface_targets(const Mesh& mesh0, const DiscreteField& eta,
                              const QuadratureRule& rule, double alpha = 10.0);

}  // namespace homesh
