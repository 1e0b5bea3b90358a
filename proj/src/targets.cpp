// SPDX-License-Identifier: Apache-2.0
#include "homesh/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace homesh {

namespace {

constexpr double kEpsRatio = 1e-8;
constexpr double kRatioMin = 0.125;
constexpr double kRatioMax = 8.0;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

TargetField::TargetField(int dim, int num_elements, int points_per_element, bool volumetric)
    : dim_(dim),
      num_elements_(num_elements),
      points_per_element_(points_per_element),
      volumetric_(volumetric) {
  const std::size_t n = static_cast<std::size_t>(num_elements) * points_per_element;
  w_.assign(n, Mat(dim));
  winv_.assign(n, Mat(dim));
  detw_.assign(n, 0.0);
}

void TargetField::set(int elem, int q, const Mat& W) {
  const double d = W.det();
  if (!(d > 0.0))
    throw std::invalid_argument("TargetField: det W must be positive (element " +
                                std::to_string(elem) + ", point " + std::to_string(q) + ")");
  const std::size_t i = index(elem, q);
  w_[i] = W;
  winv_[i] = W.inverse();
  detw_[i] = d;
}

TargetField ideal_uniform_targets(const Mesh& mesh0, const QuadratureRule& rule, bool with_size) {
  Mat W = Mat::identity(mesh0.dim());
  if (with_size) {
    const double vol = domain_volume(mesh0, rule);
    const double per_elem = vol / mesh0.num_elements();
    W = W.scaled(std::pow(per_elem, 1.0 / mesh0.dim()));
  }
  TargetField out(mesh0.dim(), mesh0.num_elements(), rule.size(), with_size);
  for (int e = 0; e < mesh0.num_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) out.set(e, q, W);
  return out;
}

Mat composed_target(double size, double orientation_angle, double skew_angle, double aspect_ratio) {
  if (!(size > 0.0)) throw std::invalid_argument("composed_target: size must be positive");
  if (!(aspect_ratio > 0.0)) throw std::invalid_argument("composed_target: aspect ratio must be positive");
  if (!(skew_angle > 0.0 && skew_angle < M_PI))
    throw std::invalid_argument("composed_target: skew angle must lie in (0, pi)");

  const double rs = std::sqrt(size);
  Mat vol = Mat::diag(rs, rs);
  Mat rot(2);
  rot(0, 0) = std::cos(orientation_angle);
  rot(0, 1) = -std::sin(orientation_angle);
  rot(1, 0) = std::sin(orientation_angle);
  rot(1, 1) = std::cos(orientation_angle);
  Mat skew(2);
  skew(0, 0) = 1.0;
  skew(0, 1) = std::cos(skew_angle);
  skew(1, 1) = std::sin(skew_angle);
  const double rr = std::sqrt(aspect_ratio);
  Mat aspect = Mat::diag(1.0 / rr, rr);
  return vol * rot * skew * aspect;
}

double size_from_indicator(const Mesh& mesh0, const DiscreteField& g, double alpha,
                           const QuadratureRule& rule) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("size_from_indicator: alpha must be >= 1");

  const BasisTable table = tabulate_basis(mesh0, rule);
  const int dim = mesh0.dim();
  const int npe = mesh0.nodes_per_element();
  double vol = 0.0, vol_g = 0.0;
  for (int e = 0; e < mesh0.num_elements(); ++e) {
    const auto el = mesh0.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      Mat A(dim);
      double gq = 0.0;
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double* grad = table.gradient(q, i);
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) A(r, c) += mesh0.coord(n, r) * grad[c];
        gq += clamp01(g.values[static_cast<std::size_t>(n)]) * table.value(q, i);
      }
      const double meas = rule.weights[static_cast<std::size_t>(q)] * A.det();
      vol += meas;
      // The interpolant of the clamped nodal values is the integrand; a
      // second clamp here would break the balance equation against int g.
      vol_g += meas * gq;
    }
  }
  return (vol_g + (vol - vol_g) / alpha) / mesh0.num_elements();
}

Mat adaptive_size_target(double g_value, double s, double alpha, int dim) {
  if (!(s > 0.0)) throw std::invalid_argument("adaptive_size_target: s must be positive");
  if (!(alpha >= 1.0)) throw std::invalid_argument("adaptive_size_target: alpha must be >= 1");
  const double g = clamp01(g_value);
  const double det = g * s + (1.0 - g) * alpha * s;
  return Mat::identity(dim).scaled(std::pow(det, 1.0 / dim));
}

TargetField adaptive_size_targets(const Mesh& mesh, const DiscreteField& g, double s, double alpha,
                                  const QuadratureRule& rule) {
  const BasisTable table = tabulate_basis(mesh, rule);
  const int npe = mesh.nodes_per_element();
  TargetField out(mesh.dim(), mesh.num_elements(), rule.size(), true);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto el = mesh.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      double gq = 0.0;
      for (int i = 0; i < npe; ++i)
        gq += clamp01(g.values[static_cast<std::size_t>(el[static_cast<std::size_t>(i)])]) *
              table.value(q, i);
      out.set(e, q, adaptive_size_target(gq, s, alpha, mesh.dim()));
    }
  }
  return out;
}

InterfaceScale interface_scale(const Mesh& mesh0, const DiscreteField& eta,
                               const QuadratureRule& rule, double alpha) {
  if (mesh0.dim() != 2) throw std::invalid_argument("interface targets are 2D only");

  InterfaceScale scale;
  scale.alpha = alpha;
  for (int e = 0; e < mesh0.num_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) {
      const FieldSample s = eval_field(eta, mesh0, e, rule.points[static_cast<std::size_t>(q)]);
      scale.max_grad_norm = std::max(scale.max_grad_norm, s.gradient.norm());
    }

  // The gradient-magnitude indicator feeds the standard size law.
  const BasisTable table = tabulate_basis(mesh0, rule);
  const int npe = mesh0.nodes_per_element();
  double vol = 0.0, vol_g = 0.0;
  for (int e = 0; e < mesh0.num_elements(); ++e) {
    const auto el = mesh0.element(e);
    for (int q = 0; q < rule.size(); ++q) {
      Mat A(2);
      for (int i = 0; i < npe; ++i) {
        const int n = el[static_cast<std::size_t>(i)];
        const double* grad = table.gradient(q, i);
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) A(r, c) += mesh0.coord(n, r) * grad[c];
      }
      const double meas = rule.weights[static_cast<std::size_t>(q)] * A.det();
      const FieldSample s = eval_field(eta, mesh0, e, rule.points[static_cast<std::size_t>(q)]);
      const double g = scale.max_grad_norm > 0.0 ? clamp01(s.gradient.norm() / scale.max_grad_norm) : 0.0;
      vol += meas;
      vol_g += meas * g;
    }
  }
  scale.size = (vol_g + (vol - vol_g) / alpha) / mesh0.num_elements();
  return scale;
}

TargetField interface_targets(const Mesh& mesh, const DiscreteField& eta,
                              const QuadratureRule& rule, const InterfaceScale& scale) {
  if (mesh.dim() != 2) throw std::invalid_argument("interface targets are 2D only");

  TargetField out(2, mesh.num_elements(), rule.size(), true);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int q = 0; q < rule.size(); ++q) {
      const FieldSample s = eval_field(eta, mesh, e, rule.points[static_cast<std::size_t>(q)]);
      const double gx = std::abs(s.gradient[0]);
      const double gy = std::abs(s.gradient[1]);
      const double r = (gx < kEpsRatio && gy < kEpsRatio)
                           ? 1.0
                           : std::clamp(gx / std::max(gy, kEpsRatio), kRatioMin, kRatioMax);
      const double g =
          scale.max_grad_norm > 0.0 ? clamp01(s.gradient.norm() / scale.max_grad_norm) : 0.0;
      const double size = g * scale.size + (1.0 - g) * scale.alpha * scale.size;
      out.set(e, q, composed_target(size, 0.0, 0.5 * M_PI, r));
    }
  return out;
}

TargetField interface_targets(const Mesh& mesh0, const DiscreteField& eta,
                              const QuadratureRule& rule, double alpha) {
  return interface_targets(mesh0, eta, rule, interface_scale(mesh0, eta, rule, alpha));
}

}  // namespace homesh
