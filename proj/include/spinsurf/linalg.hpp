#pragma once

// Small fixed-size linear algebra: 2x2 complex matrices acting on spinors,
// flat-model vectors of dimension 3/4 with an indefinite inner product, and
// tiny dense solvers.  Everything is value-semantic.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "spinsurf/core.hpp"

namespace spinsurf {

// ---------------------------------------------------------------------------
// Spinor: 2-component complex, components in the omega eigenbasis.
// ---------------------------------------------------------------------------

struct Spinor {
  cplx plus{0.0, 0.0};
  cplx minus{0.0, 0.0};

  Spinor() = default;
  Spinor(cplx a, cplx b) : plus(a), minus(b) {}

  Spinor operator+(const Spinor& o) const { return {plus + o.plus, minus + o.minus}; }
  Spinor operator-(const Spinor& o) const { return {plus - o.plus, minus - o.minus}; }
  Spinor operator-() const { return {-plus, -minus}; }
  Spinor& operator+=(const Spinor& o) {
    plus += o.plus;
    minus += o.minus;
    return *this;
  }
  friend Spinor operator*(cplx s, const Spinor& v) { return {s * v.plus, s * v.minus}; }
  friend Spinor operator*(double s, const Spinor& v) { return {s * v.plus, s * v.minus}; }

  double norm() const { return std::sqrt(std::norm(plus) + std::norm(minus)); }
};

inline double dist(const Spinor& a, const Spinor& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Mat2c
// ---------------------------------------------------------------------------

struct Mat2c {
  // row-major: m[0]=a11, m[1]=a12, m[2]=a21, m[3]=a22
  std::array<cplx, 4> m{cplx(0), cplx(0), cplx(0), cplx(0)};

  static Mat2c zero() { return {}; }
  static Mat2c identity() { return Mat2c{{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
  static Mat2c diag(cplx a, cplx b) { return Mat2c{{a, cplx(0), cplx(0), b}}; }

  cplx& operator()(int r, int c) { return m[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return m[2 * r + c]; }

  Mat2c operator+(const Mat2c& o) const {
    Mat2c r;
    for (int k = 0; k < 4; ++k) r.m[k] = m[k] + o.m[k];
    return r;
  }
  Mat2c operator-(const Mat2c& o) const {
    Mat2c r;
    for (int k = 0; k < 4; ++k) r.m[k] = m[k] - o.m[k];
    return r;
  }
  Mat2c operator-() const {
    Mat2c r;
    for (int k = 0; k < 4; ++k) r.m[k] = -m[k];
    return r;
  }
  Mat2c operator*(const Mat2c& o) const {
    Mat2c r;
    r.m[0] = m[0] * o.m[0] + m[1] * o.m[2];
    r.m[1] = m[0] * o.m[1] + m[1] * o.m[3];
    r.m[2] = m[2] * o.m[0] + m[3] * o.m[2];
    r.m[3] = m[2] * o.m[1] + m[3] * o.m[3];
    return r;
  }
  friend Mat2c operator*(cplx s, const Mat2c& a) {
    Mat2c r;
    for (int k = 0; k < 4; ++k) r.m[k] = s * a.m[k];
    return r;
  }
  friend Mat2c operator*(double s, const Mat2c& a) { return cplx(s, 0) * a; }

  Spinor operator*(const Spinor& v) const {
    return {m[0] * v.plus + m[1] * v.minus, m[2] * v.plus + m[3] * v.minus};
  }

  Mat2c adjoint() const {
    return Mat2c{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
  }
  cplx trace() const { return m[0] + m[3]; }
  cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
  Mat2c inverse() const {
    cplx d = det();
    if (std::abs(d) < 1e-300) fail(Errc::no_representation, "singular 2x2 matrix");
    cplx s = cplx(1) / d;
    return Mat2c{{s * m[3], -s * m[1], -s * m[2], s * m[0]}};
  }
  double norm() const {
    double n = 0;
    for (auto& e : m) n += std::norm(e);
    return std::sqrt(n);
  }
};

inline double dist(const Mat2c& a, const Mat2c& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// 2x2 real symmetric/general matrices used for shape operators and metrics.
// ---------------------------------------------------------------------------

struct Mat2d {
  // row-major real 2x2
  std::array<double, 4> m{0, 0, 0, 0};

  static Mat2d zero() { return {}; }
  static Mat2d identity() { return Mat2d{{1, 0, 0, 1}}; }
  static Mat2d diag(double a, double b) { return Mat2d{{a, 0, 0, b}}; }

  double& operator()(int r, int c) { return m[2 * r + c]; }
  const double& operator()(int r, int c) const { return m[2 * r + c]; }

  Mat2d operator+(const Mat2d& o) const {
    Mat2d r;
    for (int k = 0; k < 4; ++k) r.m[k] = m[k] + o.m[k];
    return r;
  }
  Mat2d operator-(const Mat2d& o) const {
    Mat2d r;
    for (int k = 0; k < 4; ++k) r.m[k] = m[k] - o.m[k];
    return r;
  }
  friend Mat2d operator*(double s, const Mat2d& a) {
    Mat2d r;
    for (int k = 0; k < 4; ++k) r.m[k] = s * a.m[k];
    return r;
  }
  std::array<double, 2> operator*(const std::array<double, 2>& v) const {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
  }
  double trace() const { return m[0] + m[3]; }
  double det() const { return m[0] * m[3] - m[1] * m[2]; }
  double norm() const {
    return std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[3] * m[3]);
  }
};

inline double dist(const Mat2d& a, const Mat2d& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Flat-model vectors (dimension 3 for kappa = 0, 4 otherwise) with a
// diagonal indefinite metric given by a sign array.
// ---------------------------------------------------------------------------

struct FlatMetric {
  int dim = 3;
  std::array<int, 4> signs{1, 1, 1, 1};
};

struct FlatVec {
  int dim = 3;
  std::array<double, 4> x{0, 0, 0, 0};

  FlatVec() = default;
  explicit FlatVec(int d) : dim(d) {}
  FlatVec(double a, double b, double c) : dim(3), x{a, b, c, 0} {}
  FlatVec(double a, double b, double c, double d) : dim(4), x{a, b, c, d} {}

  double& operator[](int i) { return x[i]; }
  const double& operator[](int i) const { return x[i]; }

  FlatVec operator+(const FlatVec& o) const {
    FlatVec r(dim);
    for (int i = 0; i < dim; ++i) r.x[i] = x[i] + o.x[i];
    return r;
  }
  FlatVec operator-(const FlatVec& o) const {
    FlatVec r(dim);
    for (int i = 0; i < dim; ++i) r.x[i] = x[i] - o.x[i];
    return r;
  }
  FlatVec& operator+=(const FlatVec& o) {
    for (int i = 0; i < dim; ++i) x[i] += o.x[i];
    return *this;
  }
  friend FlatVec operator*(double s, const FlatVec& v) {
    FlatVec r(v.dim);
    for (int i = 0; i < v.dim; ++i) r.x[i] = s * v.x[i];
    return r;
  }
  double sup_norm() const {
    double n = 0;
    for (int i = 0; i < dim; ++i) n = std::max(n, std::abs(x[i]));
    return n;
  }
};

inline double flat_inner(const FlatMetric& g, const FlatVec& a, const FlatVec& b) {
  double s = 0;
  for (int i = 0; i < g.dim; ++i) s += g.signs[i] * a.x[i] * b.x[i];
  return s;
}

// ---------------------------------------------------------------------------
// Tiny dense solvers
// ---------------------------------------------------------------------------

// Gaussian elimination with partial pivoting for small complex systems.
// Solves A x = b for n <= 8; A is row-major n x n.
inline std::vector<cplx> solve_dense(std::vector<cplx> a, std::vector<cplx> b,
                                     int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-300) fail(Errc::no_representation, "singular dense system");
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      cplx f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<cplx> x(n);
  for (int r = n - 1; r >= 0; --r) {
    cplx s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

// Least squares for a complex m x 2 system with *real* unknowns: realify and
// solve the 2x2 normal equations.  Rows: sum_k P(r,k) x_k = rhs(r).
inline std::array<double, 2> lstsq_real2(const std::vector<std::array<cplx, 2>>& rows,
                                         const std::vector<cplx>& rhs) {
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const cplx p1 = rows[r][0], p2 = rows[r][1], y = rhs[r];
    a11 += std::norm(p1);
    a22 += std::norm(p2);
    a12 += (std::conj(p1) * p2).real();
    b1 += (std::conj(p1) * y).real();
    b2 += (std::conj(p2) * y).real();
  }
  double det = a11 * a22 - a12 * a12;
  if (std::abs(det) < 1e-300)
    fail(Errc::isotropic_spinor, "degenerate extraction system");
  return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
}

// Order-of-convergence slope from residuals at grid sizes n, 2n, 4n.
inline double convergence_order(double coarse, double fine) {
  if (fine <= 0 || coarse <= 0) return 16.0;  // exact to rounding
  return std::log2(coarse / fine);
}

// Gauss-Jordan inverse for small real matrices (n <= 4), row-major.
inline std::array<double, 16> invert_real(const double* a, int n) {
  std::array<double, 16> m{}, inv{};
  for (int i = 0; i < n * n; ++i) m[i] = a[i];
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r * n + col]) > std::abs(m[piv * n + col])) piv = r;
    if (std::abs(m[piv * n + col]) < 1e-300)
      fail(Errc::shape_mismatch, "singular frame matrix");
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(m[piv * n + c], m[col * n + c]);
        std::swap(inv[piv * n + c], inv[col * n + c]);
      }
    const double d = m[col * n + col];
    for (int c = 0; c < n; ++c) {
      m[col * n + c] /= d;
      inv[col * n + c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r * n + col];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        m[r * n + c] -= f * m[col * n + c];
        inv[r * n + c] -= f * inv[col * n + c];
      }
    }
  }
  return inv;
}

}  // namespace spinsurf
