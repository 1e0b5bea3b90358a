// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homesh/objective.hpp"
#include "homesh/solver.hpp"
#include "homesh/trigger.hpp"

namespace homesh {

/// Built-in reproducible test problems:
///   perturbed-square   seeded interior perturbation of the unit square,
///                      mu9 + quadratic limiting with delta = 0.1, ideal
///                      equal-size targets
///   local-limit        same mesh with delta = 1e-4 on the x > y half and
///                      1.0 elsewhere
///   sine-interface     tanh band along y = 0.4 + 0.1 sin(2 pi x), aspect and
///                      size adapted targets, mu9
///   size-band          horizontal band indicator, size-adapted targets with
///                      alpha = 10, mu7
///   deform-sequence    shear family x(t) = x0 + t u(x0) for trigger scans
///                      with S22 = 4
struct ScenarioSpec {
  std::string name;
  int n = 0;           // elements per axis; 0 picks the scenario default
  int degree = 0;      // 0 picks the scenario default
  int refinements = 0;
  std::uint64_t seed = 42;
};

struct Scenario {
  std::string name;
  Mesh mesh0;
  ObjectiveConfig config;
  TargetBuilder targets;
  SolverParams params;
  std::map<std::string, DiscreteField> fields;  // nodal fields on mesh0
  std::optional<AdmissibleSpec> trigger_spec;
  std::vector<double> deform_times;         // deform-sequence only
  std::vector<double> deform_displacement;  // per-dof u(x0), deform-sequence only
  double perturbation_max = 0.0;            // max interior displacement applied
  double indicator_size = 0.0;              // frozen size s for adaptive targets
};

/// Throws std::invalid_argument for unknown scenario names.
Scenario build_scenario(const ScenarioSpec& spec);

const std::vector<std::string>& scenario_names();

}  // namespace homesh
