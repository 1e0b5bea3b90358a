// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "homesh/objective.hpp"

namespace homesh {

enum class SolverMode { NewtonKrylov, QuasiNewton };
enum class TargetUpdate { Lagged, FrozenAtStart };
enum class Termination { Converged, MaxIterations, LineSearchStalled };

struct SolverParams {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;  // relative inf-norm drop
  int max_linear_iterations = 200;
  double linear_rel_tol = 0.0;  // <= 0: adaptive forcing min(0.5, sqrt(rel grad))
  double contraction = 0.5;
  int max_halvings = 30;
  SolverMode mode = SolverMode::NewtonKrylov;
  TargetUpdate target_update = TargetUpdate::Lagged;
};

struct IterationRecord {
  double objective = 0.0;
  std::vector<double> metric_parts;
  double limiting_part = 0.0;
  double gradient_norm = 0.0;  // inf norm
  double min_det_jac = 0.0;
  double step_length = 0.0;  // 0 for the initial record
};

struct SolverReport {
  int iterations = 0;
  std::vector<IterationRecord> history;  // entry 0 is the initial state
  double max_displacement = 0.0;
  Termination termination = Termination::Converged;
};

const char* termination_name(Termination t);

/// Minimizes F over the free nodes with a feasibility-guarded backtracking
/// line search. The targets builder is re-invoked on the current mesh after
/// every accepted step when target_update is Lagged. Fixed nodes keep their
/// input coordinates bit-exactly. Throws when the initial mesh is infeasible
/// under the initial targets.
std::pair<Mesh, SolverReport> optimize(const Mesh& mesh, const TargetBuilder& targets_builder,
                                       const ObjectiveConfig& config, const SolverParams& params);

/// Inexact Newton direction: truncated conjugate gradients on H p = -g with
/// Hessian-vector products from central differences of the gradient. Negative
/// curvature truncates with the current iterate; a non-descent result falls
/// back to -g.
std::vector<double> newton_step(const std::vector<double>& x, const std::vector<double>& gradient,
                                const std::function<std::vector<double>(const std::vector<double>&)>& hess_vec,
                                const SolverParams& params);

/// Backtracking from step 1: a step is accepted only when the trial point is
/// feasible and satisfies the Armijo decrease with constant 1e-4. Returns
/// nullopt when the direction is not a descent direction or every trial
/// fails.
std::optional<double> line_search(const std::vector<double>& x, const std::vector<double>& direction,
                                  const std::vector<double>& gradient,
                                  const std::function<ObjectiveValue(const std::vector<double>&)>& eval,
                                  double f_current, const SolverParams& params);

}  // namespace homesh
