// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace homesh {

/// Point or displacement in 2D/3D reference or physical space.
struct Vec {
  int dim = 0;
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y) : dim(2), c{x, y, 0.0} {}
  Vec(double x, double y, double z) : dim(3), c{x, y, z} {}

  static Vec zero(int d) {
    Vec v;
    v.dim = d;
    return v;
  }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  double norm2() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += c[i] * c[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim; ++i) c[i] *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
  return s;
}

/// Dense d-by-d matrix, d = 2 or 3, row-major with fixed stride 3.
/// Used for element Jacobians A, target matrices W and weighted Jacobians T.
class Mat {
 public:
  Mat() = default;
  explicit Mat(int d) : dim_(d) {}

  static Mat identity(int d) {
    Mat m(d);
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
  static Mat diag(double a, double b) {
    Mat m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
  }
  static Mat diag(double a, double b, double c) {
    Mat m(3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
  }

  int dim() const { return dim_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * 3 + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * 3 + j)]; }

  double det() const {
    if (dim_ == 2) return a_[0] * a_[4] - a_[1] * a_[3];
    return a_[0] * (a_[4] * a_[8] - a_[5] * a_[7]) -
           a_[1] * (a_[3] * a_[8] - a_[5] * a_[6]) +
           a_[2] * (a_[3] * a_[7] - a_[4] * a_[6]);
  }

  /// Throws std::domain_error when the determinant vanishes.
  Mat inverse() const {
    const double d = det();
    if (d == 0.0) throw std::domain_error("Mat::inverse: singular matrix");
    const double id = 1.0 / d;
    Mat r(dim_);
    if (dim_ == 2) {
      r(0, 0) = a_[4] * id;
      r(0, 1) = -a_[1] * id;
      r(1, 0) = -a_[3] * id;
      r(1, 1) = a_[0] * id;
    } else {
      r(0, 0) = (a_[4] * a_[8] - a_[5] * a_[7]) * id;
      r(0, 1) = (a_[2] * a_[7] - a_[1] * a_[8]) * id;
      r(0, 2) = (a_[1] * a_[5] - a_[2] * a_[4]) * id;
      r(1, 0) = (a_[5] * a_[6] - a_[3] * a_[8]) * id;
      r(1, 1) = (a_[0] * a_[8] - a_[2] * a_[6]) * id;
      r(1, 2) = (a_[2] * a_[3] - a_[0] * a_[5]) * id;
      r(2, 0) = (a_[3] * a_[7] - a_[4] * a_[6]) * id;
      r(2, 1) = (a_[1] * a_[6] - a_[0] * a_[7]) * id;
      r(2, 2) = (a_[0] * a_[4] - a_[1] * a_[3]) * id;
    }
    return r;
  }

  Mat transpose() const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  /// Squared Frobenius norm.
  double frob2() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return s;
  }

  Mat operator*(const Mat& o) const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim_; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
  Mat operator+(const Mat& o) const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(i, j) + o(i, j);
    return r;
  }
  Mat operator-(const Mat& o) const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(i, j) - o(i, j);
    return r;
  }
  Mat scaled(double s) const {
    Mat r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r(i, j) = s * (*this)(i, j);
    return r;
  }

  Vec apply(const Vec& v) const {
    Vec r = Vec::zero(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }
  Vec apply_transpose(const Vec& v) const {
    Vec r = Vec::zero(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r[i] += (*this)(j, i) * v[j];
    return r;
  }

  /// Entrywise inner product A : B.
  double contract(const Mat& o) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * o(i, j);
    return s;
  }

 private:
  int dim_ = 0;
  std::array<double, 9> a_{};
};

}  // namespace homesh
