// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "homesh/solver.hpp"

using namespace homesh;

namespace {

ObjectiveConfig single_metric(MetricId id, XiKind xi_kind = XiKind::None, double delta = 0.1) {
  ObjectiveConfig cfg;
  cfg.terms.push_back({id, 1.0, std::nullopt});
  cfg.xi_kind = xi_kind;
  cfg.delta = delta;
  return cfg;
}

TargetBuilder static_targets(const ObjectiveConfig& cfg, bool with_size) {
  return [cfg, with_size](const Mesh& m) {
    return ideal_uniform_targets(m, cfg.quadrature(m), with_size);
  };
}

}  // namespace

TEST_CASE("already-optimal input returns unchanged in 0 iterations") {
  const Mesh mesh = cartesian_mesh(2, 2, 4);
  const ObjectiveConfig cfg = single_metric(MetricId::Shape2);
  const auto [out, report] = optimize(mesh, static_targets(cfg, false), cfg, SolverParams{});
  CHECK(report.iterations == 0);
  CHECK(report.termination == Termination::Converged);
  CHECK(out.coords() == mesh.coords());
  CHECK(report.max_displacement == 0.0);
}

TEST_CASE("limiting-only objective is solved in one Newton iteration") {
  // With only the quadratic limiting term, F is exactly quadratic in x, the
  // gradient is linear, and the finite-difference Hessian products are exact
  // up to roundoff: one Newton step from any start lands on the anchor x0.
  const Mesh mesh = cartesian_mesh(2, 2, 4);

  ObjectiveConfig cfg;
  cfg.terms.push_back({MetricId::ShapeSize9, 0.0, std::nullopt});
  cfg.xi_kind = XiKind::Quadratic;
  cfg.delta = 0.05;

  const auto rule = cfg.quadrature(mesh);
  const TargetField targets = ideal_uniform_targets(mesh, rule, true);
  const Baseline baseline = make_baseline(mesh, targets, cfg);

  // Start away from the anchor.
  const Mesh start = perturb_interior(mesh, 0.3, 17);
  std::vector<double> x = start.coords();

  SolverParams params;
  params.linear_rel_tol = 1e-12;
  params.max_linear_iterations = 1000;

  const std::vector<double> g = objective_gradient(x, baseline, targets, cfg);
  auto hess_vec = [&](const std::vector<double>& v) {
    double vnorm = 0.0, xnorm = 0.0;
    for (double w : v) vnorm = std::max(vnorm, std::abs(w));
    for (double w : x) xnorm = std::max(xnorm, std::abs(w));
    const double eps = 1e-6 * std::max(xnorm, 1.0) / vnorm;
    std::vector<double> xp = x, xm = x;
    for (std::size_t i = 0; i < v.size(); ++i) {
      xp[i] += eps * v[i];
      xm[i] -= eps * v[i];
    }
    const auto gp = objective_gradient(xp, baseline, targets, cfg);
    const auto gm = objective_gradient(xm, baseline, targets, cfg);
    std::vector<double> hv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) hv[i] = (gp[i] - gm[i]) / (2.0 * eps);
    return hv;
  };
  const std::vector<double> p = newton_step(x, g, hess_vec, params);

  // x + p is the minimizer: displacement back to x0 within linear tolerance.
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    residual = std::max(residual, std::abs(x[i] + p[i] - mesh.coords()[i]));
  CHECK(residual <= 1e-8);

  const ObjectiveValue after = eval_objective([&] {
    std::vector<double> xn = x;
    for (std::size_t i = 0; i < x.size(); ++i) xn[i] += p[i];
    return xn;
  }(), baseline, targets, cfg);
  CHECK(after.total <= 1e-16);
}

TEST_CASE("newton_step falls back to steepest descent on non-descent products") {
  // Hessian operator = -I forces immediate negative curvature.
  std::vector<double> g = {1.0, -2.0, 0.5};
  auto hess = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i];
    return out;
  };
  const auto p = newton_step({0, 0, 0}, g, hess, SolverParams{});
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(p[i] == -g[i]);
}

TEST_CASE("hessian-vector products match a dense FD Hessian on a tiny mesh") {
  const Mesh mesh = perturb_interior(cartesian_mesh(2, 1, 3), 0.2, 4);  // 2x2 free interior
  const ObjectiveConfig cfg = single_metric(MetricId::ShapeSize9, XiKind::Quadratic, 0.1);
  const auto rule = cfg.quadrature(mesh);
  const TargetField targets = ideal_uniform_targets(mesh, rule, true);
  const Baseline baseline = make_baseline(mesh, targets, cfg);

  const std::vector<double> x = mesh.coords();
  auto grad = [&](const std::vector<double>& y) {
    return objective_gradient(y, baseline, targets, cfg);
  };

  // Dense FD Hessian over the free dofs.
  const double h = 1e-5;
  const std::size_t n = x.size();
  std::vector<std::vector<double>> H(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const auto gp = grad(xp);
    const auto gm = grad(xm);
    H[j].resize(n);
    for (std::size_t i = 0; i < n; ++i) H[j][i] = (gp[i] - gm[i]) / (2.0 * h);
  }

  // Matrix-free product with the solver's epsilon strategy.
  std::vector<double> v(n, 0.0);
  int free_count = 0;
  for (int node = 0; node < mesh.num_nodes(); ++node)
    if (!mesh.is_boundary(node)) {
      v[2 * node] = 0.3 + 0.1 * free_count;
      v[2 * node + 1] = -0.2 + 0.05 * free_count;
      ++free_count;
    }
  double vnorm = 0.0, xnorm = 0.0;
  for (double w : v) vnorm = std::max(vnorm, std::abs(w));
  for (double w : x) xnorm = std::max(xnorm, std::abs(w));
  const double eps = 1e-6 * std::max(xnorm, 1.0) / vnorm;
  std::vector<double> xp = x, xm = x;
  for (std::size_t i = 0; i < n; ++i) {
    xp[i] += eps * v[i];
    xm[i] -= eps * v[i];
  }
  const auto gp = grad(xp);
  const auto gm = grad(xm);

  double scale = 0.0;
  std::vector<double> hv_dense(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) hv_dense[i] += H[j][i] * v[j];
    scale = std::max(scale, std::abs(hv_dense[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double hv = (gp[i] - gm[i]) / (2.0 * eps);
    CHECK(std::abs(hv - hv_dense[i]) <= 1e-4 * std::max(scale, 1.0));
  }
}

TEST_CASE("perturbed mesh relaxes back to the uniform lattice") {
  const Mesh base = cartesian_mesh(2, 2, 8);
  const Mesh mesh = perturb_interior(base, 0.25, 42);
  const ObjectiveConfig cfg = single_metric(MetricId::Shape2);

  SolverParams params;
  params.gradient_tolerance = 1e-10;
  const auto [out, report] = optimize(mesh, static_targets(cfg, false), cfg, params);

  CHECK(report.termination == Termination::Converged);
  // The uniform lattice is the unique nearby zero of the shape metric with
  // this fixed boundary.
  double max_dist = 0.0;
  for (int n = 0; n < out.num_nodes(); ++n)
    max_dist = std::max(max_dist, (out.node(n) - base.node(n)).norm());
  CHECK(max_dist <= 1e-4 * 0.125);

  // Monotone decrease and feasibility along the run.
  for (std::size_t i = 1; i < report.history.size(); ++i) {
    CHECK(report.history[i].objective <= report.history[i - 1].objective + 1e-14);
    CHECK(report.history[i].min_det_jac > 0.0);
  }
}

TEST_CASE("fixed boundary stays bit-identical") {
  const Mesh mesh = perturb_interior(cartesian_mesh(2, 3, 4), 0.2, 8);
  const ObjectiveConfig cfg = single_metric(MetricId::ShapeSize9, XiKind::Quadratic, 0.1);
  const auto [out, report] = optimize(mesh, static_targets(cfg, true), cfg, SolverParams{});
  for (int n : mesh.boundary_nodes())
    for (int a = 0; a < 2; ++a) CHECK(out.coord(n, a) == mesh.coord(n, a));
  CHECK(report.iterations > 0);
}

TEST_CASE("determinism: identical runs produce identical reports") {
  const Mesh mesh = perturb_interior(cartesian_mesh(2, 2, 5), 0.2, 13);
  const ObjectiveConfig cfg = single_metric(MetricId::ShapeSize9, XiKind::Quadratic, 0.05);
  const auto [out1, rep1] = optimize(mesh, static_targets(cfg, true), cfg, SolverParams{});
  const auto [out2, rep2] = optimize(mesh, static_targets(cfg, true), cfg, SolverParams{});
  CHECK(out1.coords() == out2.coords());
  REQUIRE(rep1.history.size() == rep2.history.size());
  for (std::size_t i = 0; i < rep1.history.size(); ++i) {
    CHECK(rep1.history[i].objective == rep2.history[i].objective);
    CHECK(rep1.history[i].gradient_norm == rep2.history[i].gradient_norm);
  }
}

TEST_CASE("line search guards against inversion and rejects non-descent") {
  const Mesh mesh = cartesian_mesh(2, 1, 2);
  const ObjectiveConfig cfg = single_metric(MetricId::ShapeSize9);
  const auto rule = cfg.quadrature(mesh);
  const TargetField targets = ideal_uniform_targets(mesh, rule, true);
  const Baseline baseline = make_baseline(mesh, targets, cfg);

  const std::vector<double> x = mesh.coords();
  auto eval = [&](const std::vector<double>& y) { return eval_objective(y, baseline, targets, cfg); };

  // Direction that inverts the center node's elements beyond alpha ~ 0.3:
  // the center sits at (0.5, 0.5); pushing it by (2,0) crosses the right
  // boundary at alpha = 0.25.
  const int center = 4;  // 3x3 lattice, node (1,1)
  REQUIRE(!mesh.is_boundary(center));
  std::vector<double> dir(x.size(), 0.0);
  dir[2 * center] = 2.0;
  // Make it a descent direction formally by pairing with a matching gradient.
  std::vector<double> fake_grad(x.size(), 0.0);
  fake_grad[2 * center] = -1.0;

  const double f0 = eval(x).total;
  const auto step = line_search(x, dir, fake_grad, eval, f0, SolverParams{});
  if (step) CHECK(*step < 0.3);

  // Zero direction: rejected before any evaluation.
  const std::vector<double> zero(x.size(), 0.0);
  CHECK(!line_search(x, zero, fake_grad, eval, f0, SolverParams{}).has_value());
}

TEST_CASE("quasi-newton mode reaches the same minimizer") {
  const Mesh base = cartesian_mesh(2, 2, 4);
  const Mesh mesh = perturb_interior(base, 0.2, 99);
  const ObjectiveConfig cfg = single_metric(MetricId::Shape2);

  SolverParams params;
  params.mode = SolverMode::QuasiNewton;
  params.max_iterations = 400;
  const auto [out, report] = optimize(mesh, static_targets(cfg, false), cfg, params);
  CHECK(report.termination == Termination::Converged);
  double max_dist = 0.0;
  for (int n = 0; n < out.num_nodes(); ++n)
    max_dist = std::max(max_dist, (out.node(n) - base.node(n)).norm());
  CHECK(max_dist <= 1e-3 * 0.25);
}

TEST_CASE("3D smoke: small perturbed hex mesh improves and stays feasible") {
  const Mesh mesh = perturb_interior(cartesian_mesh(3, 1, 3), 0.2, 5);
  const ObjectiveConfig cfg = single_metric(MetricId::ShapeSize7);
  SolverParams params;
  params.max_iterations = 30;
  const auto [out, report] = optimize(mesh, static_targets(cfg, true), cfg, params);
  CHECK(report.history.back().objective < report.history.front().objective);
  for (const auto& rec : report.history) CHECK(rec.min_det_jac > 0.0);
}
