// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "homesh/mesh.hpp"
#include "homesh/metrics.hpp"
#include "homesh/targets.hpp"

namespace homesh {

/// Admissible Jacobian S: the worst element shape tolerated during the
/// Lagrangian phase. Fixed once at setup; the bound mu(U), U = S W^{-1},
/// then adapts wherever the targets do.
struct AdmissibleSpec {
  Mat S;
  MetricId metric = MetricId::Shape2;
};

/// Highest admissible metric value mu(S W^{-1}) against the given target.
/// Returns kInfeasible when U violates the metric's barrier.
double admissible_bound(const AdmissibleSpec& spec, const Mat& W);

struct TriggerResult {
  bool fires = false;
  double worst_ratio = 0.0;  // max over points of mu(T) / max(mu(U), 1e-14)
  int worst_element = -1;
  int worst_point = -1;
};

/// Remesh test: fires when mu(T) >= mu(U) at any quadrature point (the
/// comparison is >= exactly, so mu(U) = 0 fires on a perfect mesh too).
/// Infeasible T anywhere fires unconditionally with an infinite ratio.
TriggerResult check_trigger(const Mesh& mesh, const TargetField& targets,
                            const AdmissibleSpec& spec, const QuadratureRule& rule);

}  // namespace homesh
