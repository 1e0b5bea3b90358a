// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "homesh/basis.hpp"
#include "homesh/linalg.hpp"
#include "homesh/quadrature.hpp"

namespace homesh {

/// Conforming high-order quad/hex mesh. Each element references
/// (degree+1)^dim nodes in lexicographic tensor order; node coordinates are
/// stored node-major (x0 y0 [z0] x1 y1 ...). Boundary nodes are derived from
/// the connectivity: every node on a face shared by fewer than two elements.
class Mesh {
 public:
  /// Empty mesh; assign a real one before use.
  Mesh() = default;
  Mesh(int dim, int degree, std::vector<double> coords, std::vector<int> connectivity);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(coords_.size()) / dim_; }
  int num_elements() const { return static_cast<int>(connectivity_.size()) / nodes_per_element_; }
  int nodes_per_element() const { return nodes_per_element_; }

  const std::vector<double>& coords() const { return coords_; }
  void set_coords(std::vector<double> coords);

  double coord(int node, int axis) const {
    return coords_[static_cast<std::size_t>(node * dim_ + axis)];
  }
  Vec node(int n) const {
    Vec p = Vec::zero(dim_);
    for (int a = 0; a < dim_; ++a) p[a] = coord(n, a);
    return p;
  }

  std::span<const int> element(int e) const {
    return {connectivity_.data() + static_cast<std::size_t>(e) * nodes_per_element_,
            static_cast<std::size_t>(nodes_per_element_)};
  }
  const std::vector<int>& connectivity() const { return connectivity_; }

  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  bool is_boundary(int node) const { return boundary_mask_[static_cast<std::size_t>(node)] != 0; }

 private:
  void compute_boundary();

  int dim_ = 0;
  int degree_ = 0;
  int nodes_per_element_ = 0;
  std::vector<double> coords_;
  std::vector<int> connectivity_;
  std::vector<int> boundary_nodes_;
  std::vector<std::uint8_t> boundary_mask_;
};

/// Structured n x n (x n) mesh of degree k on the unit cube, nodes at the
/// per-element Gauss-Lobatto lattice.
Mesh cartesian_mesh(int dim, int degree, int elements_per_axis);

/// Physical image of a reference point under the element map.
Vec map_to_physical(const Mesh& mesh, int elem, const Vec& ref_point);

/// Jacobian A = sum_i x_i (grad w_i)^T of the element map at a reference point.
Mat element_jacobian(const Mesh& mesh, int elem, const Vec& ref_point);

/// Minimum of det A over all elements and quadrature points.
double min_det_jacobian(const Mesh& mesh, const QuadratureRule& rule);

/// Splits every element into 2^dim children of the same degree. Child node
/// positions are evaluated through the parent map, so the refined mesh
/// reproduces the parent geometry exactly.
Mesh uniform_refine(const Mesh& mesh);

/// Displaces every interior node by a reproducible pseudo-random vector with
/// max-norm at most amplitude * (shortest incident lattice edge). Uses a fixed
/// 64-bit LCG (Knuth MMIX multiplier) so results are identical across
/// platforms; boundary nodes stay put.
Mesh perturb_interior(const Mesh& mesh, double amplitude, std::uint64_t seed);

/// Physical volume of the mesh image, by quadrature.
double domain_volume(const Mesh& mesh, const QuadratureRule& rule);

/// Diagonal of the coordinate bounding box.
double domain_diameter(const Mesh& mesh);

/// Per-element basis table at the rule's points, shared by evaluation loops.
BasisTable tabulate_basis(const Mesh& mesh, const QuadratureRule& rule);

}  // namespace homesh
