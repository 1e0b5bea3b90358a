// SPDX-License-Identifier: Apache-2.0
#include "homesh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace homesh {

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Limited-memory secant direction (two-loop recursion, history 10).
class SecantHistory {
 public:
  void push(std::vector<double> s, std::vector<double> y) {
    const double sy = dot(s, y);
    if (sy <= 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) return;  // skip degenerate pairs
    s_.push_back(std::move(s));
    y_.push_back(std::move(y));
    sy_.push_back(sy);
    if (s_.size() > 10) {
      s_.pop_front();
      y_.pop_front();
      sy_.pop_front();
    }
  }

  std::vector<double> direction(const std::vector<double>& g) const {
    std::vector<double> q = g;
    const int m = static_cast<int>(s_.size());
    std::vector<double> alpha(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] =
          dot(s_[static_cast<std::size_t>(i)], q) / sy_[static_cast<std::size_t>(i)];
      axpy(-alpha[static_cast<std::size_t>(i)], y_[static_cast<std::size_t>(i)], q);
    }
    if (m > 0) {
      const double gamma = sy_[static_cast<std::size_t>(m - 1)] /
                           dot(y_[static_cast<std::size_t>(m - 1)], y_[static_cast<std::size_t>(m - 1)]);
      for (double& v : q) v *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = dot(y_[static_cast<std::size_t>(i)], q) / sy_[static_cast<std::size_t>(i)];
      axpy(alpha[static_cast<std::size_t>(i)] - beta, s_[static_cast<std::size_t>(i)], q);
    }
    for (double& v : q) v = -v;
    return q;
  }

 private:
  std::deque<std::vector<double>> s_, y_;
  std::deque<double> sy_;
};

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchStalled: return "line-search-stalled";
  }
  return "?";
}

std::vector<double> newton_step(
    const std::vector<double>& x, const std::vector<double>& gradient,
    const std::function<std::vector<double>(const std::vector<double>&)>& hess_vec,
    const SolverParams& params) {
  const std::size_t n = gradient.size();
  const double gnorm2 = dot(gradient, gradient);
  if (gnorm2 == 0.0) return std::vector<double>(n, 0.0);

  // Relative residual target; standalone callers without a forcing strategy
  // get a tight default.
  const double forcing = params.linear_rel_tol > 0.0 ? params.linear_rel_tol : 1e-10;
  const double target2 = forcing * forcing * gnorm2;

  std::vector<double> p(n, 0.0);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = -gradient[i];
  std::vector<double> dir = r;
  double rr = gnorm2;

  for (int it = 0; it < params.max_linear_iterations; ++it) {
    std::vector<double> hv;
    try {
      hv = hess_vec(dir);
    } catch (const std::exception&) {
      break;  // probe left the feasible region: keep the current iterate
    }
    const double curv = dot(dir, hv);
    if (curv <= 1e-14 * dot(dir, dir)) {
      if (it == 0) {
        // Negative curvature immediately: steepest descent.
        std::vector<double> sd(n);
        for (std::size_t i = 0; i < n; ++i) sd[i] = -gradient[i];
        return sd;
      }
      break;  // truncate; p is a descent direction already
    }
    const double alpha = rr / curv;
    axpy(alpha, dir, p);
    axpy(-alpha, hv, r);
    const double rr_new = dot(r, r);
    if (rr_new <= target2) break;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) dir[i] = r[i] + beta * dir[i];
  }

  if (dot(gradient, p) >= 0.0) {
    // Not a descent direction (e.g. zero CG progress): steepest descent.
    std::vector<double> sd(n);
    for (std::size_t i = 0; i < n; ++i) sd[i] = -gradient[i];
    return sd;
  }
  (void)x;
  return p;
}

std::optional<double> line_search(const std::vector<double>& x, const std::vector<double>& direction,
                                  const std::vector<double>& gradient,
                                  const std::function<ObjectiveValue(const std::vector<double>&)>& eval,
                                  double f_current, const SolverParams& params) {
  const double slope = dot(gradient, direction);
  if (slope >= 0.0) return std::nullopt;  // not a descent direction

  std::vector<double> trial(x.size());
  double alpha = 1.0;
  for (int h = 0; h <= params.max_halvings; ++h) {
    for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * direction[i];
    const ObjectiveValue v = eval(trial);
    if (v.feasible && v.total <= f_current + 1e-4 * alpha * slope) return alpha;
    alpha *= params.contraction;
  }
  return std::nullopt;
}

std::pair<Mesh, SolverReport> optimize(const Mesh& mesh, const TargetBuilder& targets_builder,
                                       const ObjectiveConfig& config, const SolverParams& params) {
  Mesh current = mesh;
  TargetField targets = targets_builder(current);
  Baseline baseline = make_baseline(mesh, targets, config);

  SolverReport report;
  std::vector<double> x = mesh.coords();

  auto eval_at = [&](const std::vector<double>& coords) {
    return eval_objective(coords, baseline, targets, config);
  };
  auto grad_at = [&](const std::vector<double>& coords) {
    return objective_gradient(coords, baseline, targets, config);
  };

  ObjectiveValue value = eval_at(x);
  if (!value.feasible) throw std::runtime_error("optimize: initial mesh infeasible");
  std::vector<double> grad = grad_at(x);
  double gnorm = inf_norm(grad);
  const double g0norm = gnorm;

  auto record = [&](double step) {
    IterationRecord rec;
    rec.objective = value.total;
    rec.metric_parts = value.metric_parts;
    rec.limiting_part = value.limiting_part;
    rec.gradient_norm = gnorm;
    rec.min_det_jac = value.min_det_jac;
    rec.step_length = step;
    report.history.push_back(std::move(rec));
  };
  record(0.0);

  // Stationary-start guard: gradients of a normalized objective scale like
  // 1/length, so compare against roundoff at the domain scale.
  const double stationary_floor = 1e-12 / std::max(domain_diameter(mesh), 1e-30);
  if (g0norm <= stationary_floor) {
    report.termination = Termination::Converged;
    Mesh out = mesh;
    out.set_coords(x);
    return {std::move(out), std::move(report)};
  }

  SecantHistory secant;
  std::vector<double> x_prev, g_prev;
  Termination termination = Termination::MaxIterations;

  for (int iter = 1; iter <= params.max_iterations; ++iter) {
    std::vector<double> direction;
    if (params.mode == SolverMode::NewtonKrylov) {
      auto hess_vec = [&](const std::vector<double>& v) {
        const double vnorm = inf_norm(v);
        if (vnorm == 0.0) return std::vector<double>(v.size(), 0.0);
        const double eps = 1e-6 * std::max(inf_norm(x), 1.0) / vnorm;
        std::vector<double> xp = x, xm = x;
        axpy(eps, v, xp);
        axpy(-eps, v, xm);
        const std::vector<double> gp = grad_at(xp);
        const std::vector<double> gm = grad_at(xm);
        std::vector<double> hv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) hv[i] = (gp[i] - gm[i]) / (2.0 * eps);
        return hv;
      };
      SolverParams inner = params;
      if (inner.linear_rel_tol <= 0.0)
        inner.linear_rel_tol = std::min(0.5, std::sqrt(gnorm / g0norm));
      direction = newton_step(x, grad, hess_vec, inner);
    } else {
      direction = secant.direction(grad);
      if (dot(grad, direction) >= 0.0) {
        direction.assign(grad.size(), 0.0);
        axpy(-1.0, grad, direction);
      }
    }

    const std::optional<double> step = line_search(x, direction, grad, eval_at, value.total, params);
    if (!step) {
      termination = Termination::LineSearchStalled;
      break;
    }

    const double f_prev = value.total;
    x_prev = x;
    g_prev = grad;
    axpy(*step, direction, x);
    // Fixed nodes have zero direction components; re-pin them bit-exactly.
    for (int n = 0; n < mesh.num_nodes(); ++n)
      if (baseline.node_fixed(n))
        for (int a = 0; a < mesh.dim(); ++a)
          x[static_cast<std::size_t>(n * mesh.dim() + a)] =
              mesh.coords()[static_cast<std::size_t>(n * mesh.dim() + a)];

    report.iterations = iter;

    value = eval_at(x);
    if (params.target_update == TargetUpdate::Lagged) {
      current.set_coords(x);
      TargetField fresh = targets_builder(current);
      const ObjectiveValue refreshed = eval_objective(x, baseline, fresh, config);
      // Keep F continuous at the target switch: rescale each term's
      // normalization (and the limiting scale) by the refresh ratio, so the
      // recorded history measures optimization progress, not re-pricing.
      for (int s = 0; s < baseline.num_terms(); ++s) {
        const double before = value.metric_parts[static_cast<std::size_t>(s)];
        const double after = refreshed.metric_parts[static_cast<std::size_t>(s)];
        if (before > 1e-300 && after > 1e-300 && std::isfinite(after / before))
          baseline.rescale_denominator(s, after / before);
      }
      if (value.limiting_part > 1e-300 && refreshed.limiting_part > 1e-300)
        baseline.rescale_limiting_scale(value.limiting_part / refreshed.limiting_part);
      targets = std::move(fresh);
      value = eval_at(x);
    }
    grad = grad_at(x);
    gnorm = inf_norm(grad);
    record(*step);

    if (params.mode == SolverMode::QuasiNewton) {
      std::vector<double> s(x.size()), ydiff(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        s[i] = x[i] - x_prev[i];
        ydiff[i] = grad[i] - g_prev[i];
      }
      secant.push(std::move(s), std::move(ydiff));
    }

    if (gnorm <= std::max(params.gradient_tolerance * g0norm, stationary_floor)) {
      termination = Termination::Converged;
      break;
    }
    // Plateau guard: relative decrease below 1e-12 cannot make progress in
    // double precision.
    if (f_prev - value.total < 1e-12 * std::max(std::abs(f_prev), 1e-30)) {
      termination = Termination::Converged;
      break;
    }
  }

  report.termination = termination;

  double max_disp = 0.0;
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    double d2 = 0.0;
    for (int a = 0; a < mesh.dim(); ++a) {
      const double d = x[static_cast<std::size_t>(n * mesh.dim() + a)] -
                       mesh.coords()[static_cast<std::size_t>(n * mesh.dim() + a)];
      d2 += d * d;
    }
    max_disp = std::max(max_disp, std::sqrt(d2));
  }
  report.max_displacement = max_disp;

  Mesh out = mesh;
  out.set_coords(x);
  return {std::move(out), std::move(report)};
}

}  // namespace homesh
