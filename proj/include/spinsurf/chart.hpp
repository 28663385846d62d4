#pragma once

// Coordinate-chart representation of a signature-(p,q) surface: metric with
// derivatives, orthonormal frame, Levi-Civita and spin connections,
// curvature, spinor fields, covariant derivative and Dirac operator.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "spinsurf/clifford.hpp"
#include "spinsurf/core.hpp"
#include "spinsurf/linalg.hpp"

namespace spinsurf {

using ScalarFn = std::function<double(double, double)>;

struct Domain {
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
};

struct Grid {
  int nu = 64, nv = 64;
  Domain dom;
  double hu() const { return (dom.u1 - dom.u0) / (nu - 1); }
  double hv() const { return (dom.v1 - dom.v0) / (nv - 1); }
  double u(int i) const { return dom.u0 + i * hu(); }
  double v(int j) const { return dom.v0 + j * hv(); }
  int index(int i, int j) const { return i * nv + j; }
  int size() const { return nu * nv; }
};

// ---------------------------------------------------------------------------
// Metric data
// ---------------------------------------------------------------------------

// Component functions of the metric with first and second partials.  Presets
// attach analytic closures; the finite-difference constructor is the
// fallback for metrics given only by samples of g.
struct MetricFuncs {
  ScalarFn g11, g12, g22;
  ScalarFn d_u[3], d_v[3];                    // first partials of g11,g12,g22
  ScalarFn d_uu[3], d_uv[3], d_vv[3];         // second partials

  static MetricFuncs analytic(ScalarFn g11, ScalarFn g12, ScalarFn g22,
                              std::array<ScalarFn, 3> du,
                              std::array<ScalarFn, 3> dv,
                              std::array<ScalarFn, 3> duu,
                              std::array<ScalarFn, 3> duv,
                              std::array<ScalarFn, 3> dvv) {
    MetricFuncs m;
    m.g11 = std::move(g11);
    m.g12 = std::move(g12);
    m.g22 = std::move(g22);
    for (int k = 0; k < 3; ++k) {
      m.d_u[k] = du[k];
      m.d_v[k] = dv[k];
      m.d_uu[k] = duu[k];
      m.d_uv[k] = duv[k];
      m.d_vv[k] = dvv[k];
    }
    return m;
  }

  // Derivatives by 4th-order central differences of the component closures.
  static MetricFuncs finite_difference(ScalarFn g11, ScalarFn g12, ScalarFn g22,
                                       double h = 1e-4) {
    MetricFuncs m;
    m.g11 = g11;
    m.g12 = g12;
    m.g22 = g22;
    const ScalarFn comps[3] = {g11, g12, g22};
    auto du = [h](ScalarFn f) {
      return ScalarFn([f, h](double u, double v) {
        return (-f(u + 2 * h, v) + 8 * f(u + h, v) - 8 * f(u - h, v) +
                f(u - 2 * h, v)) /
               (12 * h);
      });
    };
    auto dv = [h](ScalarFn f) {
      return ScalarFn([f, h](double u, double v) {
        return (-f(u, v + 2 * h) + 8 * f(u, v + h) - 8 * f(u, v - h) +
                f(u, v - 2 * h)) /
               (12 * h);
      });
    };
    for (int k = 0; k < 3; ++k) {
      m.d_u[k] = du(comps[k]);
      m.d_v[k] = dv(comps[k]);
      m.d_uu[k] = du(m.d_u[k]);
      m.d_uv[k] = dv(m.d_u[k]);
      m.d_vv[k] = dv(m.d_v[k]);
    }
    return m;
  }

  std::array<double, 3> at(double u, double v) const {
    return {g11(u, v), g12(u, v), g22(u, v)};
  }
};

struct SurfacePatch {
  Domain dom;
  MetricFuncs metric;
  Signature signature;  // frame-ordered signs; validated by orthonormal_frame

  Mat2d metric_at(double u, double v) const {
    auto g = metric.at(u, v);
    return Mat2d{{g[0], g[1], g[1], g[2]}};
  }
};

// ---------------------------------------------------------------------------
// Orthonormal frame
// ---------------------------------------------------------------------------

// Pointwise frame data: coefficients of e_1, e_2 in (d_u, d_v) and of
// (d_u, d_v) in the frame, with the coefficient derivatives the spin
// connection needs.
struct FramePoint {
  std::array<double, 2> e1{1, 0};      // e1 = e1[0] d_u + e1[1] d_v
  std::array<double, 2> e2{0, 1};
  std::array<double, 2> du_frame{1, 0};  // d_u = du_frame[0] e1 + du_frame[1] e2
  std::array<double, 2> dv_frame{0, 1};
  std::array<int, 2> eps{1, 1};
  // partials of the frame coefficients: d[a][k][b] = d_a (e_k coefficient b)
  double dcoef[2][2][2] = {};
};

struct FrameField {
  const SurfacePatch* patch = nullptr;
  std::array<int, 2> eps{1, 1};

  FramePoint at(double u, double v) const;
};

namespace detail {

inline int sgn(double x) { return x >= 0 ? 1 : -1; }

}  // namespace detail

// Pseudo Gram-Schmidt privileging d_u.  Charts with |g11| below the frame
// tolerance are rejected rather than re-gauged.
inline FrameField orthonormal_frame(const SurfacePatch& patch,
                                    double frame_tol = 1e-8) {
  // Scan the corners and a coarse grid for degeneracy and signature
  // consistency before handing out the field.
  Grid probe{9, 9, patch.dom};
  std::array<int, 2> eps{0, 0};
  for (int i = 0; i < probe.nu; ++i)
    for (int j = 0; j < probe.nv; ++j) {
      double u = probe.u(i), v = probe.v(j);
      auto g = patch.metric.at(u, v);
      if (std::abs(g[0]) < frame_tol)
        fail(Errc::degenerate_chart, "|g11| below frame tolerance");
      double det = g[0] * g[2] - g[1] * g[1];
      if (std::abs(det) < frame_tol * frame_tol)
        fail(Errc::degenerate_chart, "metric determinant vanishes");
      std::array<int, 2> e{detail::sgn(g[0]), detail::sgn(det / g[0])};
      if (i == 0 && j == 0) eps = e;
      if (e != eps)
        fail(Errc::degenerate_chart, "signature changes across the chart");
    }
  if (eps[0] != patch.signature.eps[0] || eps[1] != patch.signature.eps[1])
    fail(Errc::degenerate_chart,
         "declared signature inconsistent with the metric");
  FrameField f;
  f.patch = &patch;
  f.eps = eps;
  return f;
}

inline FramePoint FrameField::at(double u, double v) const {
  const MetricFuncs& m = patch->metric;
  const double g11 = m.g11(u, v), g12 = m.g12(u, v), g22 = m.g22(u, v);
  FramePoint fp;
  fp.eps = eps;

  const double a1 = std::abs(g11);
  const double s1 = std::sqrt(a1);
  const double inv_s1 = 1.0 / s1;
  const double r = g12 / g11;
  const double d = g22 - g12 * g12 / g11;  // = det(g)/g11
  const double t = 1.0 / std::sqrt(std::abs(d));

  fp.e1 = {inv_s1, 0.0};
  fp.e2 = {-r * t, t};

  // Inverse: d_u = s1 e1; d_v = r*s1 e1 + (1/t) e2.
  fp.du_frame = {s1, 0.0};
  fp.dv_frame = {r * s1, 1.0 / t};

  for (int a = 0; a < 2; ++a) {
    const double dg11 = (a == 0) ? m.d_u[0](u, v) : m.d_v[0](u, v);
    const double dg12 = (a == 0) ? m.d_u[1](u, v) : m.d_v[1](u, v);
    const double dg22 = (a == 0) ? m.d_u[2](u, v) : m.d_v[2](u, v);
    const double dinv_s1 = -0.5 * eps[0] * dg11 / (a1 * s1);
    const double dr = (dg12 * g11 - g12 * dg11) / (g11 * g11);
    const double dd = dg22 - (2 * g12 * dg12 * g11 - g12 * g12 * dg11) / (g11 * g11);
    const double dt = -0.5 * eps[1] * dd * t * t * t;
    fp.dcoef[a][0][0] = dinv_s1;
    fp.dcoef[a][0][1] = 0.0;
    fp.dcoef[a][1][0] = -dr * t - r * dt;
    fp.dcoef[a][1][1] = dt;
  }
  return fp;
}

// ---------------------------------------------------------------------------
// Christoffel symbols and curvature
// ---------------------------------------------------------------------------

struct Christoffels {
  // gamma[a][b][c] = Gamma^a_{bc}
  double gamma[2][2][2] = {};
};

namespace detail {

inline void metric_tensors(const MetricFuncs& m, double u, double v,
                           double g[2][2], double dg[2][2][2]) {
  g[0][0] = m.g11(u, v);
  g[0][1] = g[1][0] = m.g12(u, v);
  g[1][1] = m.g22(u, v);
  const double du[3] = {m.d_u[0](u, v), m.d_u[1](u, v), m.d_u[2](u, v)};
  const double dv[3] = {m.d_v[0](u, v), m.d_v[1](u, v), m.d_v[2](u, v)};
  // dg[a][b][c] = d_a g_{bc}
  dg[0][0][0] = du[0];
  dg[0][0][1] = dg[0][1][0] = du[1];
  dg[0][1][1] = du[2];
  dg[1][0][0] = dv[0];
  dg[1][0][1] = dg[1][1][0] = dv[1];
  dg[1][1][1] = dv[2];
}

inline void metric_inverse(const double g[2][2], double gi[2][2]) {
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  gi[0][0] = g[1][1] / det;
  gi[0][1] = -g[0][1] / det;
  gi[1][0] = -g[1][0] / det;
  gi[1][1] = g[0][0] / det;
}

}  // namespace detail

inline Christoffels christoffels(const SurfacePatch& patch, double u, double v) {
  double g[2][2], dg[2][2][2], gi[2][2];
  detail::metric_tensors(patch.metric, u, v, g, dg);
  detail::metric_inverse(g, gi);
  Christoffels ch;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double s = 0;
        for (int d = 0; d < 2; ++d)
          s += gi[a][d] * (dg[b][d][c] + dg[c][b][d] - dg[d][b][c]);
        ch.gamma[a][b][c] = 0.5 * s;
      }
  return ch;
}

// Gauss curvature K and the frame component R_1212 = g(R(e1,e2)e2, e1)
// under the convention R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X -
// nabla_{[X,Y]}.  In dimension 2, R_1212 = K eps1 eps2.
inline double gauss_curvature(const SurfacePatch& patch, double u, double v) {
  double g[2][2], dg[2][2][2], gi[2][2];
  detail::metric_tensors(patch.metric, u, v, g, dg);
  detail::metric_inverse(g, gi);

  const double dduu[3] = {patch.metric.d_uu[0](u, v), patch.metric.d_uu[1](u, v),
                          patch.metric.d_uu[2](u, v)};
  const double dduv[3] = {patch.metric.d_uv[0](u, v), patch.metric.d_uv[1](u, v),
                          patch.metric.d_uv[2](u, v)};
  const double ddvv[3] = {patch.metric.d_vv[0](u, v), patch.metric.d_vv[1](u, v),
                          patch.metric.d_vv[2](u, v)};
  // ddg[a][e][b][c] = d_a d_e g_{bc}
  double ddg[2][2][2][2];
  auto put = [&](int a, int e, const double* vals) {
    ddg[a][e][0][0] = vals[0];
    ddg[a][e][0][1] = ddg[a][e][1][0] = vals[1];
    ddg[a][e][1][1] = vals[2];
  };
  put(0, 0, dduu);
  put(0, 1, dduv);
  put(1, 0, dduv);
  put(1, 1, ddvv);

  // dGamma[e][a][b][c] = d_e Gamma^a_{bc}
  double dgi[2][2][2];  // d_e g^{ab}
  for (int e = 0; e < 2; ++e)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0;
        for (int m2 = 0; m2 < 2; ++m2)
          for (int n = 0; n < 2; ++n) s += gi[a][m2] * dg[e][m2][n] * gi[n][b];
        dgi[e][a][b] = -s;
      }
  Christoffels ch = christoffels(patch, u, v);
  double dGamma[2][2][2][2];
  for (int e = 0; e < 2; ++e)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double s = 0;
          for (int d = 0; d < 2; ++d) {
            const double T = dg[b][d][c] + dg[c][b][d] - dg[d][b][c];
            const double dT = ddg[e][b][d][c] + ddg[e][c][b][d] - ddg[e][d][b][c];
            s += dgi[e][a][d] * T + gi[a][d] * dT;
          }
          dGamma[e][a][b][c] = 0.5 * s;
        }

  // R(d_u, d_v) d_v, then K = g(R(d_u,d_v)d_v, d_u) / det(g).
  double Rl[2];
  for (int l = 0; l < 2; ++l) {
    double s = dGamma[0][l][1][1] - dGamma[1][l][0][1];
    for (int m2 = 0; m2 < 2; ++m2)
      s += ch.gamma[m2][1][1] * ch.gamma[l][0][m2] -
           ch.gamma[m2][0][1] * ch.gamma[l][1][m2];
    Rl[l] = s;
  }
  const double lowered = g[0][0] * Rl[0] + g[0][1] * Rl[1];
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return lowered / det;
}

inline double curvature_R1212(const SurfacePatch& patch, const FrameField& frame,
                              double u, double v) {
  return gauss_curvature(patch, u, v) * frame.eps[0] * frame.eps[1];
}

// ---------------------------------------------------------------------------
// Spin connection
// ---------------------------------------------------------------------------

// omega_12 applied to a coordinate direction: omega12(d_a) = g(nabla_{d_a} e1, e2).
inline double spin_connection_coord(const SurfacePatch& patch,
                                    const FrameField& frame, int a, double u,
                                    double v) {
  const FramePoint fp = frame.at(u, v);
  const Christoffels ch = christoffels(patch, u, v);
  double g[2][2];
  g[0][0] = patch.metric.g11(u, v);
  g[0][1] = g[1][0] = patch.metric.g12(u, v);
  g[1][1] = patch.metric.g22(u, v);

  // nabla_{d_a} e1 = sum_b [d_a(e1^b) + e1^c Gamma^b_{ac}] d_b
  double nab[2];
  for (int b = 0; b < 2; ++b) {
    double s = fp.dcoef[a][0][b];
    for (int c = 0; c < 2; ++c) s += fp.e1[c] * ch.gamma[b][a][c];
    nab[b] = s;
  }
  double out = 0;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) out += nab[b] * g[b][c] * fp.e2[c];
  return out;
}

// omega_12 applied to frame direction e_k (k in {0,1}).
inline double spin_connection(const SurfacePatch& patch, const FrameField& frame,
                              int k, double u, double v) {
  const FramePoint fp = frame.at(u, v);
  const auto& e = (k == 0) ? fp.e1 : fp.e2;
  return e[0] * spin_connection_coord(patch, frame, 0, u, v) +
         e[1] * spin_connection_coord(patch, frame, 1, u, v);
}

// Matrix of the spin-connection term in coordinate direction a: the spinor
// covariant derivative is nabla_{d_a} phi = d_a phi + conn_coord(a) phi with
// conn = (1/2) eps1 eps2 omega12(d_a) e1.e2.
inline Mat2c spin_connection_matrix_coord(const SurfacePatch& patch,
                                          const FrameField& frame,
                                          const GammaRep& rep, int a, double u,
                                          double v) {
  const double w = spin_connection_coord(patch, frame, a, u, v);
  return (0.5 * frame.eps[0] * frame.eps[1] * w) * (rep.gamma[0] * rep.gamma[1]);
}

// Curvature matrix of the spin connection in coordinate directions, as
// predicted by the Ricci identity: R(d_u,d_v) phi = J (1/2) eps1 eps2 R_1221
// e1.e2.phi with J the frame-expansion Jacobian of (d_u, d_v).
inline Mat2c spin_curvature_expected(const SurfacePatch& patch,
                                     const FrameField& frame,
                                     const GammaRep& rep, double u, double v) {
  const FramePoint fp = frame.at(u, v);
  const double jac = fp.du_frame[0] * fp.dv_frame[1] -
                     fp.du_frame[1] * fp.dv_frame[0];
  const double r1221 = -curvature_R1212(patch, frame, u, v);
  return (jac * 0.5 * frame.eps[0] * frame.eps[1] * r1221) *
         (rep.gamma[0] * rep.gamma[1]);
}

// ---------------------------------------------------------------------------
// Spinor fields
// ---------------------------------------------------------------------------

// Chart-indexed field of 2-component spinors: grid samples plus an optional
// closed form with exact coordinate derivatives (manufactured solutions and
// restriction oracles attach one).
struct SpinorField {
  GammaRep rep;
  Grid grid;
  std::vector<Spinor> values;

  std::function<Spinor(double, double)> closed_form;
  std::function<std::array<Spinor, 2>(double, double)> closed_form_deriv;

  bool has_closed_form() const { return static_cast<bool>(closed_form); }

  const Spinor& at(int i, int j) const { return values[grid.index(i, j)]; }
  Spinor& at(int i, int j) { return values[grid.index(i, j)]; }

  static SpinorField from_closed_form(
      const GammaRep& rep, const Grid& grid,
      std::function<Spinor(double, double)> f,
      std::function<std::array<Spinor, 2>(double, double)> df = nullptr) {
    SpinorField field;
    field.rep = rep;
    field.grid = grid;
    field.values.resize(grid.size());
    for (int i = 0; i < grid.nu; ++i)
      for (int j = 0; j < grid.nv; ++j)
        field.values[grid.index(i, j)] = f(grid.u(i), grid.v(j));
    field.closed_form = std::move(f);
    field.closed_form_deriv = std::move(df);
    return field;
  }
};

// Coordinate partial d_a of a grid spinor field at node (i,j) by 4th-order
// differences (shifted stencils near the boundary).
inline Spinor coord_derivative(const SpinorField& field, int a, int i, int j) {
  const Grid& g = field.grid;
  if (field.closed_form_deriv)
    return field.closed_form_deriv(g.u(i), g.v(j))[a];
  const int n = (a == 0) ? g.nu : g.nv;
  if (n < 5) fail(Errc::grid_too_coarse, "need at least 5 nodes per direction");
  const int pos = (a == 0) ? i : j;
  int start = pos - 2;
  if (start < 0) start = 0;
  if (start > n - 5) start = n - 5;
  // coefficients for the derivative at (pos - start) within a 5-node window
  static const double W[5][5] = {
      {-25. / 12, 4., -3., 4. / 3, -1. / 4},
      {-1. / 4, -5. / 6, 3. / 2, -1. / 2, 1. / 12},
      {1. / 12, -2. / 3, 0., 2. / 3, -1. / 12},
      {-1. / 12, 1. / 2, -3. / 2, 5. / 6, 1. / 4},
      {1. / 4, -4. / 3, 3., -4., 25. / 12},
  };
  const double* w = W[pos - start];
  const double h = (a == 0) ? g.hu() : g.hv();
  Spinor out;
  for (int k = 0; k < 5; ++k) {
    const Spinor& s =
        (a == 0) ? field.at(start + k, j) : field.at(i, start + k);
    out += (w[k] / h) * s;
  }
  return out;
}

// Covariant derivative nabla_{e_k} phi at grid node (i,j).
inline Spinor covariant_derivative(const SpinorField& field,
                                   const SurfacePatch& patch,
                                   const FrameField& frame, int k, int i,
                                   int j) {
  const double u = field.grid.u(i), v = field.grid.v(j);
  const FramePoint fp = frame.at(u, v);
  const auto& e = (k == 0) ? fp.e1 : fp.e2;
  const Spinor du = coord_derivative(field, 0, i, j);
  const Spinor dv = coord_derivative(field, 1, i, j);
  Spinor out = e[0] * du + e[1] * dv;
  const double w = spin_connection(patch, frame, k, u, v);
  const Mat2c conn =
      (0.5 * frame.eps[0] * frame.eps[1] * w) * (field.rep.gamma[0] * field.rep.gamma[1]);
  return out + conn * field.at(i, j);
}

// Dirac operator D phi = sum_j eps_j e_j . nabla_{e_j} phi.
inline Spinor dirac_apply(const SpinorField& field, const SurfacePatch& patch,
                          const FrameField& frame, int i, int j) {
  Spinor out;
  for (int k = 0; k < 2; ++k) {
    const Spinor cd = covariant_derivative(field, patch, frame, k, i, j);
    out += double(frame.eps[k]) * (field.rep.gamma[k] * cd);
  }
  return out;
}

}  // namespace spinsurf
