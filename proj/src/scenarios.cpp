// SPDX-License-Identifier: Apache-2.0
#include "homesh/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homesh {

namespace {

Mesh refine_times(Mesh mesh, int times) {
  for (int i = 0; i < times; ++i) mesh = uniform_refine(mesh);
  return mesh;
}

double max_interior_displacement(const Mesh& before, const Mesh& after) {
  double m = 0.0;
  for (int n = 0; n < before.num_nodes(); ++n)
    m = std::max(m, (after.node(n) - before.node(n)).norm());
  return m;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "perturbed-square", "local-limit", "sine-interface", "size-band", "deform-sequence"};
  return names;
}

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario sc;
  sc.name = spec.name;

  if (spec.name == "perturbed-square" || spec.name == "local-limit") {
    const int n = spec.n > 0 ? spec.n : 8;
    const int degree = spec.degree > 0 ? spec.degree : 3;
    const Mesh uniform = cartesian_mesh(2, degree, n);
    const Mesh perturbed = perturb_interior(uniform, 0.25, spec.seed);
    sc.perturbation_max = max_interior_displacement(uniform, perturbed);
    sc.mesh0 = refine_times(perturbed, spec.refinements);

    sc.config.terms.push_back({MetricId::ShapeSize9, 1.0, std::nullopt});
    sc.config.xi_kind = XiKind::Quadratic;
    if (spec.name == "local-limit") {
      sc.config.delta_field = sample_field(sc.mesh0, [](const Vec& p) {
        return p[0] > p[1] ? 1e-4 : 1.0;  // strong limiting on the x > y half
      });
      sc.fields["delta"] = *sc.config.delta_field;
    } else {
      sc.config.delta = 0.1;
    }

    const QuadratureRule rule = sc.config.quadrature(sc.mesh0);
    const TargetField frozen = ideal_uniform_targets(sc.mesh0, rule, true);
    sc.targets = [frozen](const Mesh&) { return frozen; };
    return sc;
  }

  if (spec.name == "sine-interface") {
    const int n = spec.n > 0 ? spec.n : 16;
    const int degree = spec.degree > 0 ? spec.degree : 2;
    sc.mesh0 = refine_times(cartesian_mesh(2, degree, n), spec.refinements);

    const auto eta_fn = [](const Vec& p) {
      return 0.5 * (1.0 + std::tanh((p[1] - 0.4 - 0.1 * std::sin(2.0 * M_PI * p[0])) / 0.02));
    };
    DiscreteField eta = sample_field(sc.mesh0, eta_fn);
    sc.fields["eta"] = eta;

    sc.config.terms.push_back({MetricId::ShapeSize9, 1.0, std::nullopt});
    sc.config.xi_kind = XiKind::None;

    const QuadratureRule rule = sc.config.quadrature(sc.mesh0);
    const InterfaceScale scale = interface_scale(sc.mesh0, eta, rule);
    sc.indicator_size = scale.size;
    const Mesh mesh0 = sc.mesh0;
    sc.targets = [mesh0, eta, rule, scale](const Mesh& current) {
      if (&current == &mesh0 || current.coords() == mesh0.coords())
        return interface_targets(mesh0, eta, rule, scale);
      const DiscreteField moved = transfer_field(eta, mesh0, current);
      return interface_targets(current, moved, rule, scale);
    };
    return sc;
  }

  if (spec.name == "size-band") {
    const int n = spec.n > 0 ? spec.n : 16;
    const int degree = spec.degree > 0 ? spec.degree : 2;
    sc.mesh0 = refine_times(cartesian_mesh(2, degree, n), spec.refinements);

    // Band of width 0.2 around y = 0.5, ramped to zero over two node
    // spacings so the gradient stays resolvable after refinement.
    const double spacing = 1.0 / (n * degree * (1 << spec.refinements));
    const double ramp = 2.0 * spacing;
    const auto g_fn = [ramp](const Vec& p) {
      const double outside = std::abs(p[1] - 0.5) - 0.1;
      return std::clamp(1.0 - std::max(outside, 0.0) / ramp, 0.0, 1.0);
    };
    DiscreteField g = sample_field(sc.mesh0, g_fn);
    sc.fields["g"] = g;

    sc.config.terms.push_back({MetricId::ShapeSize7, 1.0, std::nullopt});
    sc.config.xi_kind = XiKind::None;

    const double alpha = 10.0;
    const QuadratureRule rule = sc.config.quadrature(sc.mesh0);
    const double s = size_from_indicator(sc.mesh0, g, alpha, rule);
    sc.indicator_size = s;
    const Mesh mesh0 = sc.mesh0;
    sc.targets = [mesh0, g, s, alpha, rule](const Mesh& current) {
      if (&current == &mesh0 || current.coords() == mesh0.coords())
        return adaptive_size_targets(mesh0, g, s, alpha, rule);
      const DiscreteField moved = transfer_field(g, mesh0, current);
      return adaptive_size_targets(current, moved, s, alpha, rule);
    };
    return sc;
  }

  if (spec.name == "deform-sequence") {
    const int n = spec.n > 0 ? spec.n : 8;
    const int degree = spec.degree > 0 ? spec.degree : 2;
    sc.mesh0 = refine_times(cartesian_mesh(2, degree, n), spec.refinements);

    sc.config.terms.push_back({MetricId::Shape2, 1.0, std::nullopt});
    sc.config.xi_kind = XiKind::None;

    const QuadratureRule rule = sc.config.quadrature(sc.mesh0);
    const TargetField frozen = ideal_uniform_targets(sc.mesh0, rule, false);
    sc.targets = [frozen](const Mesh&) { return frozen; };

    AdmissibleSpec trig;
    trig.S = Mat::diag(1.0, 4.0);
    trig.metric = MetricId::Shape2;
    sc.trigger_spec = trig;

    // Smooth shear u = (2.5 y^2, 0): the worst shape metric value grows
    // monotonically in t and crosses the S22 = 4 bound mid-sequence.
    sc.deform_displacement.assign(sc.mesh0.coords().size(), 0.0);
    for (int node = 0; node < sc.mesh0.num_nodes(); ++node) {
      const double y = sc.mesh0.coord(node, 1);
      sc.deform_displacement[static_cast<std::size_t>(2 * node)] = 2.5 * y * y;
    }
    for (int i = 0; i <= 20; ++i) sc.deform_times.push_back(0.05 * i);
    return sc;
  }

  throw std::invalid_argument("unknown scenario: " + spec.name);
}

}  // namespace homesh
