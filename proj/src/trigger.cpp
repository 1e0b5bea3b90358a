// SPDX-License-Identifier: Apache-2.0
#include "homesh/trigger.hpp"

#include <limits>
#include <stdexcept>

namespace homesh {

double admissible_bound(const AdmissibleSpec& spec, const Mat& W) {
  if (!(W.det() > 0.0)) throw std::invalid_argument("admissible_bound: det W must be positive");
  if (!(spec.S.det() > 0.0)) throw std::invalid_argument("admissible_bound: det S must be positive");
  return eval_metric(spec.metric, spec.S * W.inverse());
}

TriggerResult check_trigger(const Mesh& mesh, const TargetField& targets,
                            const AdmissibleSpec& spec, const QuadratureRule& rule) {
  if (targets.num_elements() != mesh.num_elements() || targets.points_per_element() != rule.size())
    throw std::invalid_argument("check_trigger: targets do not cover the quadrature points");
  check_metric_dim(spec.metric, mesh.dim());
  if (!(spec.S.det() > 0.0)) throw std::invalid_argument("check_trigger: det S must be positive");

  const BasisTable table = tabulate_basis(mesh, rule);
  const int dim = mesh.dim();
  const int npe = mesh.nodes_per_element();

  TriggerResult out;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      Mat A(dim);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double* g = table.gradient(q, i);
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) A(r, c) += mesh.coord(n, r) * g[c];
      }
      const Mat T = A * targets.inverse(e, q);
      const double mu_t = eval_metric(spec.metric, T);
      if (mu_t == kInfeasible) {
        out.fires = true;
        out.worst_ratio = std::numeric_limits<double>::infinity();
        out.worst_element = e;
        out.worst_point = q;
        return out;
      }
      const double bound = eval_metric(spec.metric, spec.S * targets.inverse(e, q));
      // Infeasible bound: nothing is admissible there, fire.
      const double ratio = bound == kInfeasible
                               ? std::numeric_limits<double>::infinity()
                               : mu_t / std::max(bound, 1e-14);
      const bool fires_here = bound == kInfeasible ? true : mu_t >= bound;
      // Lowest (element, point) wins ties: replace only on strict increase.
      if (ratio > out.worst_ratio || out.worst_element < 0) {
        out.worst_ratio = ratio;
        out.worst_element = e;
        out.worst_point = q;
      }
      if (fires_here) out.fires = true;
    }
  }
  return out;
}

}  // namespace homesh
