// SPDX-License-Identifier: Apache-2.0
#include "homesh/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace homesh {

namespace {

// xi as a function of rho = |x-x0|^2/delta^2, and its derivative in rho.
inline double xi_of_rho(XiKind kind, double rho) {
  switch (kind) {
    case XiKind::None: return 0.0;
    case XiKind::Quadratic: return rho;
    case XiKind::Exponential: return std::exp(10.0 * (rho - 1.0));
  }
  return 0.0;
}

inline double dxi_drho(XiKind kind, double rho) {
  switch (kind) {
    case XiKind::None: return 0.0;
    case XiKind::Quadratic: return 1.0;
    case XiKind::Exponential: return 10.0 * std::exp(10.0 * (rho - 1.0));
  }
  return 0.0;
}

void check_targets_shape(const Mesh& mesh, const TargetField& targets, const QuadratureRule& rule) {
  if (targets.num_elements() != mesh.num_elements() || targets.points_per_element() != rule.size() ||
      targets.dim() != mesh.dim())
    throw std::invalid_argument("targets do not match the mesh/quadrature layout");
}

}  // namespace

double xi(XiKind kind, const Vec& displacement, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("xi: delta must be positive");
  return xi_of_rho(kind, displacement.norm2() / (delta * delta));
}

QuadratureRule ObjectiveConfig::quadrature(const Mesh& mesh) const {
  const int q = quad_points > 0 ? quad_points : mesh.degree() + 2;
  return gauss_legendre_rule(q, mesh.dim());
}

Baseline::Baseline(const Mesh& mesh0, QuadratureRule rule)
    : mesh0_(mesh0), rule_(std::move(rule)), basis_(mesh0.degree(), mesh0.dim(), rule_.points) {}

Baseline make_baseline(const Mesh& mesh0, const TargetField& targets, const ObjectiveConfig& config) {
  if (config.terms.empty()) throw std::invalid_argument("make_baseline: at least one metric term");
  for (const auto& term : config.terms) check_metric_dim(term.metric, mesh0.dim());

  Baseline b(mesh0, config.quadrature(mesh0));
  const QuadratureRule& rule = b.rule_;
  check_targets_shape(mesh0, targets, rule);

  const int dim = mesh0.dim();
  const int ne = mesh0.num_elements();
  const int nq = rule.size();
  const int npe = mesh0.nodes_per_element();
  const int n_terms = static_cast<int>(config.terms.size());

  // Fixed-node mask: explicit free set, or everything but the boundary.
  b.fixed_mask_.assign(static_cast<std::size_t>(mesh0.num_nodes()), 0);
  if (config.free_nodes) {
    for (auto& v : b.fixed_mask_) v = 1;
    for (int n : *config.free_nodes) {
      if (n < 0 || n >= mesh0.num_nodes())
        throw std::invalid_argument("make_baseline: free node index out of range");
      b.fixed_mask_[static_cast<std::size_t>(n)] = 0;
    }
  } else {
    for (int n : mesh0.boundary_nodes()) b.fixed_mask_[static_cast<std::size_t>(n)] = 1;
  }

  // Weight fields and delta field must live on mesh0's nodes.
  for (const auto& term : config.terms)
    if (term.weight_field &&
        term.weight_field->values.size() != static_cast<std::size_t>(mesh0.num_nodes()))
      throw std::invalid_argument("make_baseline: weight field size does not match mesh0");
  if (config.delta_field &&
      config.delta_field->values.size() != static_cast<std::size_t>(mesh0.num_nodes()))
    throw std::invalid_argument("make_baseline: delta field size does not match mesh0");
  if (config.xi_kind != XiKind::None) {
    if (config.delta_field) {
      for (double v : config.delta_field->values)
        if (!(v > 0.0))
          throw std::invalid_argument("make_baseline: delta must be positive where limiting is active");
    } else if (!(config.delta > 0.0)) {
      throw std::invalid_argument("make_baseline: delta must be positive where limiting is active");
    }
  }

  const double delta_floor = 1e-12 * std::max(domain_diameter(mesh0), 1e-300);

  b.x0_phys_.resize(static_cast<std::size_t>(ne) * nq * dim);
  b.delta_.resize(static_cast<std::size_t>(ne) * nq);
  b.weights_.resize(static_cast<std::size_t>(n_terms) * ne * nq);
  b.denominators_.assign(static_cast<std::size_t>(n_terms), 0.0);
  b.identity_normalized_.assign(static_cast<std::size_t>(n_terms), 0);
  // Weighted target measure per term; a denominator at roundoff level of it
  // means the mesh is already optimal for that metric.
  std::vector<double> measure_scale(static_cast<std::size_t>(n_terms), 0.0);

  double volume = 0.0;
  for (int e = 0; e < ne; ++e) {
    const auto el = mesh0.element(e);
    for (int q = 0; q < nq; ++q) {
      const std::size_t qi = static_cast<std::size_t>(e) * nq + q;
      Mat A(dim);
      double delta_q = config.delta;
      Vec x0q = Vec::zero(dim);
      double dq_field = 0.0;
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double v = b.basis_.value(q, i);
        const double* g = b.basis_.gradient(q, i);
        for (int r = 0; r < dim; ++r) {
          x0q[r] += v * mesh0.coord(n, r);
          for (int c = 0; c < dim; ++c) A(r, c) += mesh0.coord(n, r) * g[c];
        }
        if (config.delta_field) dq_field += v * config.delta_field->values[static_cast<std::size_t>(n)];
      }
      if (config.delta_field) delta_q = dq_field;
      // Interpolation of a positive nodal field can undershoot near jumps;
      // such points clamp to the floor and are effectively frozen.
      b.delta_[qi] = std::max(delta_q, delta_floor);
      for (int r = 0; r < dim; ++r) b.x0_phys_[qi * dim + r] = x0q[r];

      volume += rule.weights[static_cast<std::size_t>(q)] * A.det();

      const Mat T0 = A * targets.inverse(e, q);
      const double det_t0 = T0.det();
      if (det_t0 <= 0.0)
        throw std::runtime_error("initial mesh infeasible under targets: det T = " +
                                 std::to_string(det_t0) + " at element " + std::to_string(e) +
                                 ", point " + std::to_string(q));

      const double measure = rule.weights[static_cast<std::size_t>(q)] * targets.det(e, q);
      for (int s = 0; s < n_terms; ++s) {
        const auto& term = config.terms[static_cast<std::size_t>(s)];
        double w = term.weight;
        if (term.weight_field) {
          w = 0.0;
          for (int i = 0; i < npe; ++i)
            w += b.basis_.value(q, i) *
                 term.weight_field->values[static_cast<std::size_t>(el[static_cast<std::size_t>(i)])];
        }
        if (w < 0.0) throw std::invalid_argument("make_baseline: metric weights must be >= 0");
        b.weights_[(static_cast<std::size_t>(s) * ne + e) * nq + q] = w;
        b.denominators_[static_cast<std::size_t>(s)] += measure * w * eval_metric(term.metric, T0);
        measure_scale[static_cast<std::size_t>(s)] += measure * w;
      }
    }
  }

  for (int s = 0; s < n_terms; ++s) {
    if (b.denominators_[static_cast<std::size_t>(s)] <=
        1e-14 * measure_scale[static_cast<std::size_t>(s)]) {
      b.denominators_[static_cast<std::size_t>(s)] = 1.0;
      b.identity_normalized_[static_cast<std::size_t>(s)] = 1;
    }
  }

  b.limiting_scale_ = targets.volumetric() ? 1.0 / volume : 1.0 / ne;
  return b;
}

ObjectiveValue eval_objective(const std::vector<double>& x, const Baseline& baseline,
                              const TargetField& targets, const ObjectiveConfig& config) {
  const Mesh& mesh = baseline.mesh0();
  const QuadratureRule& rule = baseline.rule();
  check_targets_shape(mesh, targets, rule);
  if (x.size() != mesh.coords().size())
    throw std::invalid_argument("eval_objective: coordinate vector size mismatch");
  const int n_terms = baseline.num_terms();
  if (static_cast<int>(config.terms.size()) != n_terms)
    throw std::invalid_argument("eval_objective: config does not match baseline");

  const int dim = mesh.dim();
  const int ne = mesh.num_elements();
  const int nq = rule.size();
  const int npe = mesh.nodes_per_element();
  const BasisTable& basis = baseline.basis();

  ObjectiveValue out;
  out.metric_parts.assign(static_cast<std::size_t>(n_terms), 0.0);
  out.min_det_jac = std::numeric_limits<double>::infinity();

  // Per-element partial sums keep the reduction order fixed.
  std::vector<double> elem_metric(static_cast<std::size_t>(ne) * n_terms, 0.0);
  std::vector<double> elem_lim(static_cast<std::size_t>(ne), 0.0);

  bool feasible = true;
  for (int e = 0; e < ne && feasible; ++e) {
    const auto el = mesh.element(e);
    for (int q = 0; q < nq; ++q) {
      Mat A(dim);
      Vec xq = Vec::zero(dim);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double v = basis.value(q, i);
        const double* g = basis.gradient(q, i);
        for (int r = 0; r < dim; ++r) {
          const double xr = x[static_cast<std::size_t>(n * dim + r)];
          xq[r] += v * xr;
          for (int c = 0; c < dim; ++c) A(r, c) += xr * g[c];
        }
      }
      const double det_a = A.det();
      out.min_det_jac = std::min(out.min_det_jac, det_a);

      const Mat T = A * targets.inverse(e, q);
      if (T.det() <= 0.0) {
        feasible = false;
        break;
      }
      const double measure = rule.weights[static_cast<std::size_t>(q)] * targets.det(e, q);
      for (int s = 0; s < n_terms; ++s) {
        const double mu = eval_metric(config.terms[static_cast<std::size_t>(s)].metric, T);
        elem_metric[static_cast<std::size_t>(e) * n_terms + s] +=
            measure * baseline.weight_at(s, e, q) * mu;
      }
      if (config.xi_kind != XiKind::None) {
        const double* x0q = baseline.x0_image(e, q);
        double d2 = 0.0;
        for (int r = 0; r < dim; ++r) {
          const double dr = xq[r] - x0q[r];
          d2 += dr * dr;
        }
        const double delta = baseline.delta_at(e, q);
        elem_lim[static_cast<std::size_t>(e)] += measure * xi_of_rho(config.xi_kind, d2 / (delta * delta));
      }
    }
  }

  if (!feasible) {
    out.feasible = false;
    out.total = std::numeric_limits<double>::infinity();
    return out;
  }

  for (int s = 0; s < n_terms; ++s) {
    double num = 0.0;
    for (int e = 0; e < ne; ++e) num += elem_metric[static_cast<std::size_t>(e) * n_terms + s];
    out.metric_parts[static_cast<std::size_t>(s)] = num / (n_terms * baseline.denominator(s));
  }
  if (config.xi_kind != XiKind::None) {
    double lim = 0.0;
    for (int e = 0; e < ne; ++e) lim += elem_lim[static_cast<std::size_t>(e)];
    out.limiting_part = baseline.limiting_scale() * lim;
  }
  out.total = out.limiting_part;
  for (double p : out.metric_parts) out.total += p;
  return out;
}

std::vector<double> objective_gradient(const std::vector<double>& x, const Baseline& baseline,
                                       const TargetField& targets, const ObjectiveConfig& config) {
  const Mesh& mesh = baseline.mesh0();
  const QuadratureRule& rule = baseline.rule();
  check_targets_shape(mesh, targets, rule);
  if (x.size() != mesh.coords().size())
    throw std::invalid_argument("objective_gradient: coordinate vector size mismatch");
  const int n_terms = baseline.num_terms();
  if (static_cast<int>(config.terms.size()) != n_terms)
    throw std::invalid_argument("objective_gradient: config does not match baseline");

  const int dim = mesh.dim();
  const int ne = mesh.num_elements();
  const int nq = rule.size();
  const int npe = mesh.nodes_per_element();
  const BasisTable& basis = baseline.basis();
  const double c = baseline.limiting_scale();

  std::vector<double> grad(x.size(), 0.0);
  std::vector<double> local(static_cast<std::size_t>(npe) * dim);

  for (int e = 0; e < ne; ++e) {
    const auto el = mesh.element(e);
    std::fill(local.begin(), local.end(), 0.0);
    for (int q = 0; q < nq; ++q) {
      Mat A(dim);
      Vec xq = Vec::zero(dim);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double v = basis.value(q, i);
        const double* g = basis.gradient(q, i);
        for (int r = 0; r < dim; ++r) {
          const double xr = x[static_cast<std::size_t>(n * dim + r)];
          xq[r] += v * xr;
          for (int cc = 0; cc < dim; ++cc) A(r, cc) += xr * g[cc];
        }
      }
      const Mat& winv = targets.inverse(e, q);
      const Mat T = A * winv;
      if (T.det() <= 0.0)
        throw std::domain_error("objective_gradient: infeasible point (det T <= 0 at element " +
                                std::to_string(e) + ", point " + std::to_string(q) + ")");

      const double measure = rule.weights[static_cast<std::size_t>(q)] * targets.det(e, q);

      // Sum of metric-gradient matrices, scaled by each term's coefficient.
      Mat gsum(dim);
      for (int s = 0; s < n_terms; ++s) {
        const double coeff =
            measure * baseline.weight_at(s, e, q) / (n_terms * baseline.denominator(s));
        if (coeff == 0.0) continue;
        const Mat gm = metric_grad(config.terms[static_cast<std::size_t>(s)].metric, T);
        for (int r = 0; r < dim; ++r)
          for (int cc = 0; cc < dim; ++cc) gsum(r, cc) += coeff * gm(r, cc);
      }

      double lim_coeff = 0.0;
      Vec disp = Vec::zero(dim);
      if (config.xi_kind != XiKind::None) {
        const double* x0q = baseline.x0_image(e, q);
        double d2 = 0.0;
        for (int r = 0; r < dim; ++r) {
          disp[r] = xq[r] - x0q[r];
          d2 += disp[r] * disp[r];
        }
        const double delta = baseline.delta_at(e, q);
        const double inv_d2 = 1.0 / (delta * delta);
        lim_coeff = c * measure * dxi_drho(config.xi_kind, d2 * inv_d2) * 2.0 * inv_d2;
      }

      for (int i = 0; i < npe; ++i) {
        const double* g = basis.gradient(q, i);
        // v = W^{-T} grad_i; chain rule gives node contribution gsum * v.
        Vec v = Vec::zero(dim);
        for (int r = 0; r < dim; ++r)
          for (int cc = 0; cc < dim; ++cc) v[r] += winv(cc, r) * g[cc];
        const double shape_v = basis.value(q, i);
        for (int r = 0; r < dim; ++r) {
          double acc = 0.0;
          for (int cc = 0; cc < dim; ++cc) acc += gsum(r, cc) * v[cc];
          local[static_cast<std::size_t>(i * dim + r)] += acc + lim_coeff * shape_v * disp[r];
        }
      }
    }
    for (int i = 0; i < npe; ++i) {
      const int n = el[static_cast<std::size_t>(i)];
      if (baseline.node_fixed(n)) continue;
      for (int r = 0; r < dim; ++r)
        grad[static_cast<std::size_t>(n * dim + r)] += local[static_cast<std::size_t>(i * dim + r)];
    }
  }
  return grad;
}

std::vector<double> full_fd_gradient(const std::vector<double>& x, const Baseline& baseline,
                                     const TargetBuilder& builder, const ObjectiveConfig& config,
                                     double step) {
  const Mesh& mesh0 = baseline.mesh0();
  std::vector<double> grad(x.size(), 0.0);
  Mesh probe = mesh0;

  auto value_at = [&](const std::vector<double>& coords) {
    probe.set_coords(coords);
    const TargetField w = builder(probe);
    const ObjectiveValue v = eval_objective(coords, baseline, w, config);
    if (!v.feasible) throw std::domain_error("full_fd_gradient: infeasible probe point");
    return v.total;
  };

  std::vector<double> coords = x;
  for (int n = 0; n < mesh0.num_nodes(); ++n) {
    if (baseline.node_fixed(n)) continue;
    for (int r = 0; r < mesh0.dim(); ++r) {
      const std::size_t idx = static_cast<std::size_t>(n * mesh0.dim() + r);
      const double saved = coords[idx];
      coords[idx] = saved + step;
      const double fp = value_at(coords);
      coords[idx] = saved - step;
      const double fm = value_at(coords);
      coords[idx] = saved;
      grad[idx] = (fp - fm) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace homesh
