#pragma once

// Catalog of explicit immersed surfaces in pseudo-Riemannian space forms,
// realized inside flat models (dimension 3 for kappa = 0, dimension 4 for
// the pseudo-sphere / pseudo-hyperbolic quadrics).  Presets carry analytic
// metric, embedding, unit normal and shape operator and act as ground truth
// for the transport / reconstruction round trips.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "spinsurf/chart.hpp"
#include "spinsurf/core.hpp"
#include "spinsurf/linalg.hpp"

namespace spinsurf {

using EmbedFn = std::function<FlatVec(double, double)>;

// Shape operator field in the orthonormal frame, with analytic partials
// when available (finite differences otherwise).
struct AField {
  std::function<Mat2d(double, double)> value;
  std::function<Mat2d(double, double)> du, dv;

  Mat2d deriv(int a, double u, double v, double h = 1e-5) const {
    const auto& f = (a == 0) ? du : dv;
    if (f) return f(u, v);
    Mat2d p2 = value(a == 0 ? u + 2 * h : u, a == 0 ? v : v + 2 * h);
    Mat2d p1 = value(a == 0 ? u + h : u, a == 0 ? v : v + h);
    Mat2d m1 = value(a == 0 ? u - h : u, a == 0 ? v : v - h);
    Mat2d m2 = value(a == 0 ? u - 2 * h : u, a == 0 ? v : v - 2 * h);
    return (1.0 / (12 * h)) * ((-1.0) * p2 + 8.0 * p1 + (-8.0) * m1 + m2);
  }

  static AField constant(const Mat2d& a) {
    AField f;
    f.value = [a](double, double) { return a; };
    f.du = [](double, double) { return Mat2d::zero(); };
    f.dv = [](double, double) { return Mat2d::zero(); };
    return f;
  }
};

struct ImmersedSurface {
  std::string name;
  SurfacePatch patch;
  FlatMetric model;     // flat ambient model
  ImmersionContext context;
  EmbedFn embed, embed_u, embed_v;
  EmbedFn embed_uu, embed_uv, embed_vv;
  EmbedFn normal, normal_u, normal_v;
  AField shape;         // declared shape operator in the orthonormal frame
  double mean_curvature(double u, double v) const {
    return -0.5 * shape.value(u, v).trace();
  }
};

// ---------------------------------------------------------------------------
// Shape operator from the embedding (Weingarten route)
// ---------------------------------------------------------------------------

// A(e_i) = -(tangential part of d_{e_i} nu) expressed in the orthonormal
// frame.  The normal orientation is the preset's; the catalog freezes it so
// the round sphere with outward normal has A = -Id and H = +1.
inline Mat2d shape_from_embedding(const ImmersedSurface& surf,
                                  const FrameField& frame, double u, double v,
                                  double normal_tol = 1e-10) {
  const FlatVec nu = surf.normal(u, v);
  const double nn = flat_inner(surf.model, nu, nu);
  if (std::abs(nn) < normal_tol)
    fail(Errc::normal_degenerate, "normal is lightlike at a sample point");

  const FramePoint fp = frame.at(u, v);
  const FlatVec xu = surf.embed_u(u, v);
  const FlatVec xv = surf.embed_v(u, v);
  const FlatVec nu_u = surf.normal_u(u, v);
  const FlatVec nu_v = surf.normal_v(u, v);

  FlatVec E[2];
  E[0] = fp.e1[0] * xu + fp.e1[1] * xv;
  E[1] = fp.e2[0] * xu + fp.e2[1] * xv;

  Mat2d a;
  for (int i = 0; i < 2; ++i) {
    const auto& c = (i == 0) ? fp.e1 : fp.e2;
    const FlatVec dnu = c[0] * nu_u + c[1] * nu_v;
    for (int j = 0; j < 2; ++j)
      a(j, i) = -fp.eps[j] * flat_inner(surf.model, dnu, E[j]);
  }
  return a;
}

// Max residual over the grid of the contracted Gauss equation
// R_1212 = eps1 eps2 (delta det A + kappa), delta = +1 spacelike / -1
// timelike normal.
inline double gauss_equation_check(const ImmersedSurface& surf,
                                   const Grid& grid) {
  FrameField frame = orthonormal_frame(surf.patch);
  const double delta = surf.context.eps2();
  const double kappa = surf.context.kappa;
  double worst = 0;
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      const double u = grid.u(i), v = grid.v(j);
      const double r1212 = curvature_R1212(surf.patch, frame, u, v);
      const double det_a = surf.shape.value(u, v).det();
      const double rhs = frame.eps[0] * frame.eps[1] * (delta * det_a + kappa);
      worst = std::max(worst, std::abs(r1212 - rhs));
    }
  return worst;
}

// Copy of the surface with one shape-operator entry scaled by (1+rel); used
// by the obstruction tests and the --perturb-a flag.
inline ImmersedSurface perturb_shape(const ImmersedSurface& surf, double rel) {
  ImmersedSurface out = surf;
  const AField base = surf.shape;
  auto bump = [rel](Mat2d m) {
    m(0, 0) *= (1.0 + rel);
    return m;
  };
  out.shape.value = [base, bump](double u, double v) { return bump(base.value(u, v)); };
  out.shape.du = base.du ? std::function<Mat2d(double, double)>(
                               [base, bump](double u, double v) {
                                 return bump(base.du(u, v));
                               })
                         : nullptr;
  out.shape.dv = base.dv ? std::function<Mat2d(double, double)>(
                               [base, bump](double u, double v) {
                                 return bump(base.dv(u, v));
                               })
                         : nullptr;
  out.name = surf.name + "+perturbed-A";
  return out;
}

// ---------------------------------------------------------------------------
// Preset catalog
// ---------------------------------------------------------------------------

namespace detail {

// Diagonal metric g = c11 du^2 + w(u) dv^2 with analytic derivatives.
inline MetricFuncs warped_metric(double c11, std::function<double(double)> w,
                                 std::function<double(double)> w1,
                                 std::function<double(double)> w2) {
  auto zero = ScalarFn([](double, double) { return 0.0; });
  return MetricFuncs::analytic(
      [c11](double, double) { return c11; }, zero,
      [w](double u, double) { return w(u); },
      {zero, zero, [w1](double u, double) { return w1(u); }},
      {zero, zero, zero},
      {zero, zero, [w2](double u, double) { return w2(u); }},
      {zero, zero, zero}, {zero, zero, zero});
}

struct RotationSurface {
  // 3D rotation-type embedding (f(u) cos v, f(u) sin v, g(u)) with the
  // third axis optionally first (axis_first) to match the model signature.
  std::function<double(double)> f, f1, g, g1;
  bool axis_last = true;

  FlatVec point(double u, double v) const {
    const double fu = f(u);
    if (axis_last) return {fu * std::cos(v), fu * std::sin(v), g(u)};
    return {g(u), fu * std::cos(v), fu * std::sin(v)};
  }
  FlatVec d_u(double u, double v) const {
    const double f1u = f1(u);
    if (axis_last) return {f1u * std::cos(v), f1u * std::sin(v), g1(u)};
    return {g1(u), f1u * std::cos(v), f1u * std::sin(v)};
  }
  FlatVec d_v(double u, double v) const {
    const double fu = f(u);
    if (axis_last) return {-fu * std::sin(v), fu * std::cos(v), 0.0};
    return {0.0, -fu * std::sin(v), fu * std::cos(v)};
  }
};

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"flat-plane-r3",       "round-sphere-r3",   "hyperbolic-plane-r21",
          "de-sitter-r21",       "anti-hyperbolic-r12", "anti-sphere-r03",
          "geodesic-sphere-s3",  "geodesic-sphere-h3"};
}

inline ImmersedSurface load_preset(const std::string& name) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  ImmersedSurface s;
  s.name = name;

  auto second_partials_fd = [&s]() {
    // Analytic first partials are exact; seconds by differencing them keeps
    // the catalog compact and is accurate to ~1e-11 with h = 1e-4.
    const double h = 1e-4;
    auto diff = [h](EmbedFn f, int a) {
      return EmbedFn([f, a, h](double u, double v) {
        FlatVec p2 = f(a == 0 ? u + 2 * h : u, a == 0 ? v : v + 2 * h);
        FlatVec p1 = f(a == 0 ? u + h : u, a == 0 ? v : v + h);
        FlatVec m1 = f(a == 0 ? u - h : u, a == 0 ? v : v - h);
        FlatVec m2 = f(a == 0 ? u - 2 * h : u, a == 0 ? v : v - 2 * h);
        return (1.0 / (12 * h)) * ((-1.0) * p2 + 8.0 * p1 + (-8.0) * m1 + m2);
      });
    };
    s.embed_uu = diff(s.embed_u, 0);
    s.embed_uv = diff(s.embed_u, 1);
    s.embed_vv = diff(s.embed_v, 1);
  };

  if (name == "flat-plane-r3") {
    s.model = {3, {1, 1, 1}};
    s.context = ImmersionContext::make(false, 0.0);
    s.patch.dom = {0.0, 1.0, 0.0, 1.0};
    s.patch.signature = Signature::surface(1, 1);
    s.patch.metric = detail::warped_metric(
        1.0, [](double) { return 1.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; });
    s.embed = [](double u, double v) { return FlatVec{u, v, 0.0}; };
    s.embed_u = [](double, double) { return FlatVec{1, 0, 0}; };
    s.embed_v = [](double, double) { return FlatVec{0, 1, 0}; };
    s.normal = [](double, double) { return FlatVec{0, 0, 1}; };
    s.normal_u = [](double, double) { return FlatVec{0, 0, 0}; };
    s.normal_v = [](double, double) { return FlatVec{0, 0, 0}; };
    s.shape = AField::constant(Mat2d::zero());
    second_partials_fd();
    return s;
  }

  if (name == "round-sphere-r3" || name == "anti-sphere-r03") {
    const bool anti = (name == "anti-sphere-r03");
    s.model = anti ? FlatMetric{3, {-1, -1, -1}} : FlatMetric{3, {1, 1, 1}};
    s.context = ImmersionContext::make(anti, 0.0);
    s.patch.dom = {0.6, 1.8, 0.2, 1.4};
    const double sg = anti ? -1.0 : 1.0;
    s.patch.signature = anti ? Signature::surface(-1, -1) : Signature::surface(1, 1);
    s.patch.metric = detail::warped_metric(
        sg, [sg](double u) { return sg * sin(u) * sin(u); },
        [sg](double u) { return sg * sin(2 * u); },
        [sg](double u) { return 2 * sg * cos(2 * u); });
    detail::RotationSurface r{[](double u) { return sin(u); },
                              [](double u) { return cos(u); },
                              [](double u) { return cos(u); },
                              [](double u) { return -sin(u); }};
    s.embed = [r](double u, double v) { return r.point(u, v); };
    s.embed_u = [r](double u, double v) { return r.d_u(u, v); };
    s.embed_v = [r](double u, double v) { return r.d_v(u, v); };
    s.normal = s.embed;
    s.normal_u = s.embed_u;
    s.normal_v = s.embed_v;
    s.shape = AField::constant(Mat2d::diag(-1.0, -1.0));
    second_partials_fd();
    return s;
  }

  if (name == "hyperbolic-plane-r21" || name == "anti-hyperbolic-r12") {
    const bool anti = (name == "anti-hyperbolic-r12");
    // hyperbolic-plane-r21: H^2 in R^{2,1}, timelike normal (eps = i).
    // anti-hyperbolic-r12: the (0,2) copy in R^{1,2}, spacelike normal.
    s.model = anti ? FlatMetric{3, {1, -1, -1}} : FlatMetric{3, {1, 1, -1}};
    s.context = ImmersionContext::make(!anti, 0.0);
    s.patch.dom = {0.3, 1.5, 0.2, 1.4};
    const double sg = anti ? -1.0 : 1.0;
    s.patch.signature = anti ? Signature::surface(-1, -1) : Signature::surface(1, 1);
    s.patch.metric = detail::warped_metric(
        sg, [sg](double u) { return sg * sinh(u) * sinh(u); },
        [sg](double u) { return sg * sinh(2 * u); },
        [sg](double u) { return 2 * sg * cosh(2 * u); });
    detail::RotationSurface r{[](double u) { return sinh(u); },
                              [](double u) { return cosh(u); },
                              [](double u) { return cosh(u); },
                              [](double u) { return sinh(u); }};
    r.axis_last = !anti;  // R^{1,2} puts the plus axis first
    s.embed = [r](double u, double v) { return r.point(u, v); };
    s.embed_u = [r](double u, double v) { return r.d_u(u, v); };
    s.embed_v = [r](double u, double v) { return r.d_v(u, v); };
    s.normal = s.embed;
    s.normal_u = s.embed_u;
    s.normal_v = s.embed_v;
    s.shape = AField::constant(Mat2d::diag(-1.0, -1.0));
    second_partials_fd();
    return s;
  }

  if (name == "de-sitter-r21") {
    s.model = {3, {1, 1, -1}};
    s.context = ImmersionContext::make(false, 0.0);
    // Domain kept inside the band where the transported default spinors
    // stay non-isotropic with margin (the pairing oscillates along v).
    s.patch.dom = {-0.25, 0.25, 0.2, 0.55};
    s.patch.signature = Signature::surface(-1, 1);
    s.patch.metric = detail::warped_metric(
        -1.0, [](double u) { return cosh(u) * cosh(u); },
        [](double u) { return sinh(2 * u); },
        [](double u) { return 2 * cosh(2 * u); });
    detail::RotationSurface r{[](double u) { return cosh(u); },
                              [](double u) { return sinh(u); },
                              [](double u) { return sinh(u); },
                              [](double u) { return cosh(u); }};
    s.embed = [r](double u, double v) { return r.point(u, v); };
    s.embed_u = [r](double u, double v) { return r.d_u(u, v); };
    s.embed_v = [r](double u, double v) { return r.d_v(u, v); };
    s.normal = s.embed;
    s.normal_u = s.embed_u;
    s.normal_v = s.embed_v;
    s.shape = AField::constant(Mat2d::diag(-1.0, -1.0));
    second_partials_fd();
    return s;
  }

  if (name == "geodesic-sphere-s3" || name == "geodesic-sphere-h3") {
    const bool hyp = (name == "geodesic-sphere-h3");
    const double r0 = 0.8;
    s.model = hyp ? FlatMetric{4, {1, 1, 1, -1}} : FlatMetric{4, {1, 1, 1, 1}};
    s.context = ImmersionContext::make(false, hyp ? cplx(0, 0.5) : cplx(0.5, 0));
    s.patch.dom = {0.6, 1.8, 0.2, 1.4};
    s.patch.signature = Signature::surface(1, 1);
    const double sr = hyp ? sinh(r0) : sin(r0);
    const double cr = hyp ? cosh(r0) : cos(r0);
    s.patch.metric = detail::warped_metric(
        sr * sr, [sr](double u) { return sr * sr * sin(u) * sin(u); },
        [sr](double u) { return sr * sr * sin(2 * u); },
        [sr](double u) { return 2 * sr * sr * cos(2 * u); });
    auto n3 = [](double u, double v) {
      return FlatVec{sin(u) * cos(v), sin(u) * sin(v), cos(u)};
    };
    auto n3u = [](double u, double v) {
      return FlatVec{cos(u) * cos(v), cos(u) * sin(v), -sin(u)};
    };
    auto n3v = [](double u, double v) {
      return FlatVec{-sin(u) * sin(v), sin(u) * cos(v), 0.0};
    };
    auto lift = [](FlatVec n, double scale, double last) {
      return FlatVec{scale * n[0], scale * n[1], scale * n[2], last};
    };
    s.embed = [=](double u, double v) { return lift(n3(u, v), sr, cr); };
    s.embed_u = [=](double u, double v) { return lift(n3u(u, v), sr, 0.0); };
    s.embed_v = [=](double u, double v) { return lift(n3v(u, v), sr, 0.0); };
    // nu = (cr * n, -sr) on the sphere, (cr * n, sr) on the hyperbolic model.
    const double last = hyp ? sr : -sr;
    s.normal = [=](double u, double v) { return lift(n3(u, v), cr, last); };
    s.normal_u = [=](double u, double v) { return lift(n3u(u, v), cr, 0.0); };
    s.normal_v = [=](double u, double v) { return lift(n3v(u, v), cr, 0.0); };
    const double a0 = -cr / sr;
    s.shape = AField::constant(Mat2d::diag(a0, a0));
    second_partials_fd();
    return s;
  }

  fail(Errc::unknown_preset, name);
}

// ---------------------------------------------------------------------------
// Preset consistency measurements (used by tests and the report command)
// ---------------------------------------------------------------------------

struct PresetCheck {
  double metric_match = 0;      // induced metric vs declared components
  double normal_orthogonal = 0; // <d_a x, nu>
  double normal_unit = 0;       // <nu,nu> -/+ 1
  double shape_match = 0;       // declared A vs Weingarten route
  double shape_symmetry = 0;    // g(A e1, e2) - g(e1, A e2)
  double quadric = 0;           // <x,x> - 1/kappa (kappa != 0 only)
  double gauss_equation = 0;
};

inline PresetCheck check_preset(const ImmersedSurface& s, const Grid& grid) {
  PresetCheck out;
  FrameField frame = orthonormal_frame(s.patch);
  const double nn_expect = s.context.eps2();
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      const double u = grid.u(i), v = grid.v(j);
      const FlatVec xu = s.embed_u(u, v), xv = s.embed_v(u, v);
      const FlatVec nu = s.normal(u, v);
      const auto g = s.patch.metric.at(u, v);
      out.metric_match = std::max(
          out.metric_match,
          std::max({std::abs(flat_inner(s.model, xu, xu) - g[0]),
                    std::abs(flat_inner(s.model, xu, xv) - g[1]),
                    std::abs(flat_inner(s.model, xv, xv) - g[2])}));
      out.normal_orthogonal =
          std::max(out.normal_orthogonal,
                   std::max(std::abs(flat_inner(s.model, xu, nu)),
                            std::abs(flat_inner(s.model, xv, nu))));
      out.normal_unit = std::max(
          out.normal_unit, std::abs(flat_inner(s.model, nu, nu) - nn_expect));
      const Mat2d a_emb = shape_from_embedding(s, frame, u, v);
      const Mat2d a_dec = s.shape.value(u, v);
      out.shape_match = std::max(out.shape_match, dist(a_emb, a_dec));
      // g-symmetry in the orthonormal frame: eps2 A^2_1 = eps1 A^1_2.
      out.shape_symmetry =
          std::max(out.shape_symmetry, std::abs(frame.eps[1] * a_dec(1, 0) -
                                                frame.eps[0] * a_dec(0, 1)));
      if (s.context.kappa != 0.0) {
        const FlatVec x = s.embed(u, v);
        out.quadric = std::max(out.quadric,
                               std::abs(flat_inner(s.model, x, x) -
                                        1.0 / s.context.kappa));
      }
    }
  out.gauss_equation = gauss_equation_check(s, grid);
  return out;
}

}  // namespace spinsurf
