// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "homesh/fields.hpp"
#include "homesh/mesh.hpp"
#include "homesh/metrics.hpp"
#include "homesh/quadrature.hpp"
#include "homesh/targets.hpp"

namespace homesh {

/// Node-displacement penalty shape: quadratic rho = |x-x0|^2/delta^2, or the
/// exponential exp(10(rho - 1)) that stays dormant until |x-x0| nears delta.
enum class XiKind { None, Quadratic, Exponential };

/// xi(x - x0, delta). Unitless, zero-at-rest (quadratic) and exactly 1 when
/// |displacement| = delta for both shapes.
double xi(XiKind kind, const Vec& displacement, double delta);

/// One metric term: which metric, and its spatial weight (a constant or a
/// nodal field on the Lagrangian mesh).
struct MetricTerm {
  MetricId metric = MetricId::Shape2;
  double weight = 1.0;
  std::optional<DiscreteField> weight_field;  // overrides `weight` when set
};

struct ObjectiveConfig {
  std::vector<MetricTerm> terms;
  XiKind xi_kind = XiKind::None;
  double delta = 1.0;
  std::optional<DiscreteField> delta_field;  // overrides `delta` when set
  int quad_points = 0;                       // points per axis; 0 -> degree + 2
  std::optional<std::vector<int>> free_nodes;  // default: complement of the boundary

  QuadratureRule quadrature(const Mesh& mesh) const;
};

struct ObjectiveValue {
  double total = 0.0;
  std::vector<double> metric_parts;  // each starts at 1/n on the Lagrangian mesh
  double limiting_part = 0.0;
  bool feasible = true;
  double min_det_jac = 0.0;  // min det A over the sweep, for solver reports
};

/// Everything frozen on the Lagrangian mesh x0: normalization denominators
/// D_s, the limiting scale c, per-point images x0_q, limiting distances and
/// weights looked up by (element, reference point) provenance.
class Baseline {
 public:
  const Mesh& mesh0() const { return mesh0_; }
  const QuadratureRule& rule() const { return rule_; }
  const BasisTable& basis() const { return basis_; }
  int num_terms() const { return static_cast<int>(denominators_.size()); }
  double denominator(int s) const { return denominators_[static_cast<std::size_t>(s)]; }
  bool identity_normalized(int s) const { return identity_normalized_[static_cast<std::size_t>(s)] != 0; }
  double limiting_scale() const { return limiting_scale_; }
  bool node_fixed(int n) const { return fixed_mask_[static_cast<std::size_t>(n)] != 0; }
  const std::vector<std::uint8_t>& fixed_mask() const { return fixed_mask_; }

  double delta_at(int elem, int q) const {
    return delta_[static_cast<std::size_t>(elem) * rule_.size() + q];
  }
  const double* x0_image(int elem, int q) const {
    return &x0_phys_[(static_cast<std::size_t>(elem) * rule_.size() + q) * mesh0_.dim()];
  }
  double weight_at(int s, int elem, int q) const {
    return weights_[(static_cast<std::size_t>(s) * mesh0_.num_elements() + elem) * rule_.size() + q];
  }

  /// Lagged-target protocol: refreshing W re-prices the metric integrals, so
  /// the solver rescales the normalization to keep F continuous at the
  /// switch point (progress stays comparable across target frames).
  void rescale_denominator(int s, double factor) {
    denominators_[static_cast<std::size_t>(s)] *= factor;
  }
  void rescale_limiting_scale(double factor) { limiting_scale_ *= factor; }

  friend Baseline make_baseline(const Mesh&, const TargetField&, const ObjectiveConfig&);

 private:
  Baseline(const Mesh& mesh0, QuadratureRule rule);

  Mesh mesh0_;
  QuadratureRule rule_;
  BasisTable basis_;
  std::vector<double> x0_phys_;
  std::vector<double> delta_;
  std::vector<double> weights_;
  std::vector<double> denominators_;
  std::vector<std::uint8_t> identity_normalized_;
  std::vector<std::uint8_t> fixed_mask_;
  double limiting_scale_ = 1.0;
};

/// Freezes normalization and limiting data on mesh0. Throws when the mesh is
/// infeasible under the targets (naming the worst quadrature point) or when
/// config invariants are violated. A term whose denominator vanishes (already
/// optimal mesh) is normalized by 1 and flagged.
Baseline make_baseline(const Mesh& mesh0, const TargetField& targets, const ObjectiveConfig& config);

/// F(x) and its parts. Integration uses the target measure w_q det W for the
/// metric and limiting sums alike; any det T <= 0 marks the value infeasible
/// (total = +inf).
ObjectiveValue eval_objective(const std::vector<double>& x, const Baseline& baseline,
                              const TargetField& targets, const ObjectiveConfig& config);

/// Analytic dF/dx in lagged-target mode (W held constant). Entries of fixed
/// nodes are zero. Throws std::domain_error at infeasible x.
std::vector<double> objective_gradient(const std::vector<double>& x, const Baseline& baseline,
                                       const TargetField& targets, const ObjectiveConfig& config);

/// Central finite differences of F including the target dependence on x
/// (rebuilds W through the builder per probe). Intended for small meshes, to
/// quantify the lagged-gradient error.
std::vector<double> full_fd_gradient(const std::vector<double>& x, const Baseline& baseline,
                                     const TargetBuilder& builder, const ObjectiveConfig& config,
                                     double step);

}  // namespace homesh
