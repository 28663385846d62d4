#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "spinsurf/ambient.hpp"
#include "spinsurf/chart.hpp"

using namespace spinsurf;

TEST_CASE("flat chart: trivial frame, connection and curvature") {
  const SurfacePatch p = oracles::flat_patch(1, 1);
  const FrameField frame = orthonormal_frame(p);
  const FramePoint fp = frame.at(0.3, 0.7);
  CHECK(fp.e1[0] == 1.0);
  CHECK(fp.e2[1] == 1.0);
  CHECK(fp.eps[0] == 1);
  CHECK(fp.eps[1] == 1);

  const Christoffels ch = christoffels(p, 0.3, 0.7);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) CHECK(ch.gamma[a][b][c] == 0.0);
  CHECK(curvature_R1212(p, frame, 0.3, 0.7) == 0.0);
  CHECK(spin_connection(p, frame, 0, 0.3, 0.7) == 0.0);
  CHECK(spin_connection(p, frame, 1, 0.3, 0.7) == 0.0);

  // constant spinor is parallel and harmonic, exactly
  const GammaRep rep = build_rep(p.signature, CliffordConvention::frozen());
  Grid grid{16, 16, p.dom};
  SpinorField f = SpinorField::from_closed_form(
      rep, grid, [](double, double) { return Spinor{{0.4, 0.1}, {0.2, -0.6}}; });
  f.closed_form = nullptr;  // force the finite-difference path
  f.closed_form_deriv = nullptr;
  CHECK(covariant_derivative(f, p, frame, 0, 7, 7).norm() == 0.0);
  CHECK(dirac_apply(f, p, frame, 7, 7).norm() == 0.0);
}

TEST_CASE("sphere chart: frame normalization and spin connection") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const FrameField frame = orthonormal_frame(s.patch);
  const double u = 1.0, v = 0.5;
  const FramePoint fp = frame.at(u, v);
  CHECK(fp.e2[1] == Catch::Approx(1.0 / std::sin(u)).epsilon(1e-12));
  CHECK(spin_connection(s.patch, frame, 1, u, v) ==
        Catch::Approx(1.0 / std::tan(u)).epsilon(1e-10));
  CHECK(spin_connection(s.patch, frame, 0, u, v) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("curvature against the sample-only Brioschi oracle") {
  // preset name -> expected R_1212 in the orthonormal frame
  const std::pair<const char*, double> cases[] = {
      {"round-sphere-r3", 1.0},
      {"de-sitter-r21", -1.0},
      {"hyperbolic-plane-r21", -1.0},
      {"anti-sphere-r03", -1.0},
      {"anti-hyperbolic-r12", 1.0},
  };
  for (const auto& [name, expected] : cases) {
    const ImmersedSurface s = load_preset(name);
    const FrameField frame = orthonormal_frame(s.patch);
    const Grid probe{5, 5, s.patch.dom};
    for (int i = 1; i < 4; ++i)
      for (int j = 1; j < 4; ++j) {
        const double u = probe.u(i), v = probe.v(j);
        const double r = curvature_R1212(s.patch, frame, u, v);
        CHECK(r == Catch::Approx(expected).margin(1e-10));
        const double k_oracle = oracles::brioschi_curvature(s.patch, u, v);
        CHECK(r == Catch::Approx(k_oracle * frame.eps[0] * frame.eps[1])
                       .margin(1e-6));
      }
  }
}

TEST_CASE("metric compatibility of the connection") {
  for (const auto& name : preset_names()) {
    const ImmersedSurface s = load_preset(name);
    const FrameField frame = orthonormal_frame(s.patch);
    const Grid probe{4, 4, s.patch.dom};
    for (int i = 1; i < 3; ++i)
      for (int j = 1; j < 3; ++j)
        CHECK(oracles::compatibility_defect(s.patch, frame, probe.u(i),
                                            probe.v(j)) < 1e-8);
  }
}

TEST_CASE("spin connection curvature satisfies the Ricci identity") {
  // finite-difference curvature of the connection form against the
  // (1/2) eps1 eps2 R_1221 e1.e2 prediction, in coordinate directions
  for (const char* name : {"round-sphere-r3", "de-sitter-r21"}) {
    const ImmersedSurface s = load_preset(name);
    const FrameField frame = orthonormal_frame(s.patch);
    const GammaRep rep = build_rep(
        Signature::surface(frame.eps[0], frame.eps[1]), CliffordConvention::frozen());
    const double h = 1e-5;
    const Grid probe{4, 4, s.patch.dom};
    for (int i = 1; i < 3; ++i) {
      const double u = probe.u(i), v = probe.v(i);
      auto A = [&](int a, double uu, double vv) {
        return spin_connection_matrix_coord(s.patch, frame, rep, a, uu, vv);
      };
      const Mat2c dAv_du =
          (1.0 / (2 * h)) * (A(1, u + h, v) - A(1, u - h, v));
      const Mat2c dAu_dv =
          (1.0 / (2 * h)) * (A(0, u, v + h) - A(0, u, v - h));
      const Mat2c comm = A(0, u, v) * A(1, u, v) - A(1, u, v) * A(0, u, v);
      const Mat2c F = dAv_du - dAu_dv + comm;
      const Mat2c expected = spin_curvature_expected(s.patch, frame, rep, u, v);
      CHECK(dist(F, expected) < 1e-8);
    }
  }
}

TEST_CASE("finite-difference covariant derivative converges at 4th order") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const FrameField frame = orthonormal_frame(s.patch);
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  auto value = [](double u, double v) {
    return Spinor{{std::cos(u), std::sin(v)}, {std::sin(u + v), u * v * 0.2}};
  };
  auto dvalue = [](double u, double v) {
    return std::array<Spinor, 2>{
        Spinor{{-std::sin(u), 0.0}, {std::cos(u + v), 0.2 * v}},
        Spinor{{0.0, std::cos(v)}, {std::cos(u + v), 0.2 * u}}};
  };
  double residual[3];
  int idx = 0;
  for (int n : {17, 33, 65}) {
    Grid grid{n, n, s.patch.dom};
    SpinorField fd_field = SpinorField::from_closed_form(rep, grid, value);
    fd_field.closed_form = nullptr;
    SpinorField exact_field = SpinorField::from_closed_form(rep, grid, value, dvalue);
    double worst = 0;
    for (int i = 0; i < n; i += 3)
      for (int j = 0; j < n; j += 3)
        for (int k = 0; k < 2; ++k)
          worst = std::max(
              worst, dist(covariant_derivative(fd_field, s.patch, frame, k, i, j),
                          covariant_derivative(exact_field, s.patch, frame, k, i, j)));
    residual[idx++] = worst;
  }
  CHECK(convergence_order(residual[0], residual[1]) > 3.5);
  CHECK(convergence_order(residual[1], residual[2]) > 3.5);
}

TEST_CASE("Dirac operator is linear to machine precision") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const FrameField frame = orthonormal_frame(s.patch);
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  Grid grid{16, 16, s.patch.dom};
  auto f1 = [](double u, double v) { return Spinor{{u, v}, {u * v, 1.0}}; };
  auto f2 = [](double u, double v) { return Spinor{{v * v, -u}, {0.3, u + v}}; };
  const cplx a{0.7, -0.2}, b{-0.4, 1.1};
  SpinorField F1 = SpinorField::from_closed_form(rep, grid, f1);
  SpinorField F2 = SpinorField::from_closed_form(rep, grid, f2);
  SpinorField Fc = SpinorField::from_closed_form(rep, grid, [&](double u, double v) {
    return a * f1(u, v) + b * f2(u, v);
  });
  F1.closed_form = F2.closed_form = Fc.closed_form = nullptr;
  for (int i = 2; i < 14; i += 4)
    for (int j = 2; j < 14; j += 4) {
      const Spinor lhs = dirac_apply(Fc, s.patch, frame, i, j);
      const Spinor rhs = a * dirac_apply(F1, s.patch, frame, i, j) +
                         b * dirac_apply(F2, s.patch, frame, i, j);
      CHECK(dist(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("degenerate charts are rejected") {
  SurfacePatch p = oracles::flat_patch(1, 1);
  p.dom = {-0.5, 0.5, 0.0, 1.0};
  p.metric = MetricFuncs::finite_difference(
      [](double u, double) { return u; },  // g11 crosses zero
      [](double, double) { return 0.0; }, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(orthonormal_frame(p), Error);

  // and grids too coarse for the 5-point stencils
  const SurfacePatch q = oracles::flat_patch(1, 1);
  const FrameField frame = orthonormal_frame(q);
  const GammaRep rep = build_rep(q.signature, CliffordConvention::frozen());
  Grid tiny{4, 4, q.dom};
  SpinorField f = SpinorField::from_closed_form(
      rep, tiny, [](double, double) { return Spinor{1.0, 0.0}; });
  f.closed_form = nullptr;
  CHECK_THROWS_AS(coord_derivative(f, 0, 1, 1), Error);
}

TEST_CASE("chart CSV dump has the documented columns") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  Grid grid{8, 8, s.patch.dom};
  const std::string csv = csv_chart(s.patch, grid);
  CHECK(csv.rfind("u,v,g11,g12,g22,eps1,eps2,R1212\n", 0) == 0);
  size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 1 + 8 * 8);
}
