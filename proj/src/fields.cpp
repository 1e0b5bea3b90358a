// SPDX-License-Identifier: Apache-2.0
#include "homesh/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace homesh {

DiscreteField sample_field(const Mesh& mesh, const std::function<double(const Vec&)>& f) {
  DiscreteField out;
  out.values.resize(static_cast<std::size_t>(mesh.num_nodes()));
  for (int n = 0; n < mesh.num_nodes(); ++n) out.values[static_cast<std::size_t>(n)] = f(mesh.node(n));
  return out;
}

FieldSample eval_field(const DiscreteField& field, const Mesh& mesh, int elem, const Vec& ref_point) {
  if (field.values.size() != static_cast<std::size_t>(mesh.num_nodes()))
    throw std::invalid_argument("eval_field: field size does not match mesh");

  const ShapeEval se = shape_functions(mesh.degree(), mesh.dim(), ref_point);
  const auto el = mesh.element(elem);
  const int dim = mesh.dim();

  FieldSample out;
  Mat A(dim);
  Vec ref_grad = Vec::zero(dim);
  for (int i = 0; i < mesh.nodes_per_element(); ++i) {
    const int n = el[static_cast<std::size_t>(i)];
    const double v = field.values[static_cast<std::size_t>(n)];
    out.value += v * se.values[static_cast<std::size_t>(i)];
    for (int a = 0; a < dim; ++a) {
      ref_grad[a] += v * se.gradients[static_cast<std::size_t>(i)][a];
      for (int r = 0; r < dim; ++r) A(r, a) += mesh.coord(n, r) * se.gradients[static_cast<std::size_t>(i)][a];
    }
  }
  if (A.det() <= 0.0) {
    out.feasible = false;
    out.gradient = Vec::zero(dim);
    return out;
  }
  out.gradient = A.inverse().apply_transpose(ref_grad);  // A^{-t} grad_ref
  return out;
}

bool locate_point(const Mesh& mesh, const Vec& p, const std::vector<int>& candidates,
                  int& elem, Vec& ref) {
  const int dim = mesh.dim();
  const double diam = std::max(domain_diameter(mesh), 1e-30);
  const double tol = 1e-12 * diam;
  const double cube_slack = 1e-8;

  for (int e : candidates) {
    Vec xi = Vec::zero(dim);
    for (int a = 0; a < dim; ++a) xi[a] = 0.5;
    bool ok = false;
    for (int it = 0; it < 25; ++it) {
      const Vec r = p - map_to_physical(mesh, e, xi);
      if (r.norm() <= tol) {
        ok = true;
        break;
      }
      const Mat A = element_jacobian(mesh, e, xi);
      if (std::abs(A.det()) < 1e-300) break;
      xi += A.inverse().apply(r);
      // Keep the iterate near the reference cube; far excursions mean
      // the point belongs to another element.
      bool wild = false;
      for (int a = 0; a < dim; ++a)
        if (xi[a] < -0.5 || xi[a] > 1.5) wild = true;
      if (wild) break;
    }
    if (!ok) continue;
    bool inside = true;
    for (int a = 0; a < dim; ++a)
      if (xi[a] < -cube_slack || xi[a] > 1.0 + cube_slack) inside = false;
    if (!inside) continue;
    for (int a = 0; a < dim; ++a) xi[a] = std::clamp(xi[a], 0.0, 1.0);
    elem = e;
    ref = xi;
    return true;
  }
  return false;
}

namespace {

std::vector<std::vector<int>> node_to_elements(const Mesh& mesh) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(mesh.num_nodes()));
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int n : mesh.element(e)) adj[static_cast<std::size_t>(n)].push_back(e);
  return adj;
}

Vec element_center(const Mesh& mesh, int e) {
  Vec c = Vec::zero(mesh.dim());
  for (int n : mesh.element(e)) c += mesh.node(n);
  c *= 1.0 / mesh.nodes_per_element();
  return c;
}

}  // namespace

DiscreteField transfer_field(const DiscreteField& field0, const Mesh& mesh0,
                             const Mesh& current_mesh, TransferReport* report) {
  if (field0.values.size() != static_cast<std::size_t>(mesh0.num_nodes()))
    throw std::invalid_argument("transfer_field: field size does not match mesh0");
  if (current_mesh.num_nodes() != mesh0.num_nodes() ||
      current_mesh.connectivity() != mesh0.connectivity() ||
      current_mesh.degree() != mesh0.degree() || current_mesh.dim() != mesh0.dim())
    throw std::invalid_argument("transfer_field: current mesh must share mesh0's topology");

  const int dim = mesh0.dim();
  const auto adj = node_to_elements(mesh0);

  DiscreteField out;
  out.values.resize(static_cast<std::size_t>(current_mesh.num_nodes()));
  TransferReport local_report;

  std::vector<int> order(static_cast<std::size_t>(mesh0.num_elements()));
  for (int node = 0; node < current_mesh.num_nodes(); ++node) {
    const Vec p = current_mesh.node(node);
    int elem = -1;
    Vec ref;
    // The node's own elements almost always contain its new position.
    if (!locate_point(mesh0, p, adj[static_cast<std::size_t>(node)], elem, ref)) {
      // Widen to all elements by distance to their centers.
      std::iota(order.begin(), order.end(), 0);
      std::vector<double> dist(order.size());
      for (std::size_t e = 0; e < order.size(); ++e)
        dist[e] = (element_center(mesh0, static_cast<int>(e)) - p).norm2();
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return dist[static_cast<std::size_t>(a)] != dist[static_cast<std::size_t>(b)]
                   ? dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]
                   : a < b;
      });
      if (!locate_point(mesh0, p, order, elem, ref)) {
        // Divergent inverse map: nearest point of a 5^d lattice over the
        // node's candidate elements.
        double best = std::numeric_limits<double>::infinity();
        const auto& cands = adj[static_cast<std::size_t>(node)];
        for (int e : cands) {
          const int m = 5;
          const int mz = dim == 3 ? m : 1;
          for (int iz = 0; iz < mz; ++iz)
            for (int iy = 0; iy < m; ++iy)
              for (int ix = 0; ix < m; ++ix) {
                Vec xi = Vec::zero(dim);
                xi[0] = ix / (m - 1.0);
                xi[1] = iy / (m - 1.0);
                if (dim == 3) xi[2] = iz / (m - 1.0);
                const double d = (map_to_physical(mesh0, e, xi) - p).norm2();
                if (d < best) {
                  best = d;
                  elem = e;
                  ref = xi;
                }
              }
        }
        local_report.fallback_count += 1;
        local_report.flagged_nodes.push_back(node);
      }
    }
    out.values[static_cast<std::size_t>(node)] = eval_field(field0, mesh0, elem, ref).value;
  }
  if (report) *report = std::move(local_report);
  return out;
}

}  // namespace homesh
