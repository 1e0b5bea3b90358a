// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "homesh/mesh.hpp"

namespace homesh {

/// Scalar nodal field interpolated with the mesh's kinematic basis. Values
/// are indexed by the host mesh's node numbering; the host is passed
/// explicitly wherever the field is evaluated.
struct DiscreteField {
  std::vector<double> values;
};

/// Nodal sampling of an analytic function on the mesh.
DiscreteField sample_field(const Mesh& mesh, const std::function<double(const Vec&)>& f);

struct FieldSample {
  double value = 0.0;
  Vec gradient;
  bool feasible = true;
};

/// Field value and physical-space gradient at a reference point of an
/// element. The gradient transforms by the inverse-transpose Jacobian;
/// feasible is false when det A <= 0 there.
FieldSample eval_field(const DiscreteField& field, const Mesh& mesh, int elem, const Vec& ref_point);

struct TransferReport {
  int fallback_count = 0;
  std::vector<int> flagged_nodes;
};

/// Finds (element, reference point) in `mesh` whose image is p. Newton on
/// the element map, seeded by the candidate list; returns false when no
/// candidate converges inside the reference cube.
bool locate_point(const Mesh& mesh, const Vec& p, const std::vector<int>& candidates,
                  int& elem, Vec& ref);

/// Evaluates a field living on mesh0 at the node positions of current_mesh
/// (same topology, moved nodes) by inverse mapping and interpolation. Nodes
/// whose inverse map diverges fall back to the nearest sample of a 5^d
/// lattice over the candidate elements and are flagged in the report.
DiscreteField transfer_field(const DiscreteField& field0, const Mesh& mesh0,
                             const Mesh& current_mesh, TransferReport* report = nullptr);

}  // namespace homesh
