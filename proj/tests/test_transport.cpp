#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "spinsurf/transport.hpp"

using namespace spinsurf;

TEST_CASE("flat plane: parallel transport is exact") {
  const ImmersedSurface s = load_preset("flat-plane-r3");
  auto data = SpecialKillingData::from_surface(s, {1.0, 0.0}, +1);
  const Grid grid{32, 32, s.patch.dom};
  const TransportResult res = transport_solve(data, grid);
  CHECK(res.killing_residual < 1e-14);
  CHECK(res.holonomy_defect < 1e-13);
  for (const auto& v : res.field.values) CHECK(dist(v, Spinor{1.0, 0.0}) < 1e-14);
  // H = 0: both Dirac coefficient pairs degenerate to zero
  CHECK(dirac_residual(res, data, DiracCoefficients::frozen()) < 1e-13);
  CHECK(dirac_residual(res, data, DiracCoefficients::theorem_statement()) < 1e-13);
}

TEST_CASE("killing_rhs assembles the statement-2 right side") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const FrameField frame = orthonormal_frame(s.patch);
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  auto data = SpecialKillingData::from_surface(s, {1.0, 0.0}, +1);
  const double u = 1.1, v = 0.7;
  const Mat2c m = killing_rhs(data, frame, rep, 1, u, v);
  // manual assembly: (eps/2) A(e_2).gamma - i lambda gamma_2 omega - conn
  const Mat2d a = s.shape.value(u, v);
  Mat2c manual = (0.5 * s.context.epsilon) *
                 (a(0, 1) * rep.gamma[0] + a(1, 1) * rep.gamma[1]);
  manual = manual - (cplx(0, 1) * s.context.lambda) * (rep.gamma[1] * rep.omega);
  const double w = spin_connection(s.patch, frame, 1, u, v);
  manual = manual - (0.5 * frame.eps[0] * frame.eps[1] * w) *
                        (rep.gamma[0] * rep.gamma[1]);
  CHECK(dist(m, manual) < 1e-14);

  // flat chart with A = 0 and lambda = 0: the parallel-transport equation
  SpecialKillingData flat;
  flat.patch = oracles::flat_patch(1, 1);
  flat.shape = AField::constant(Mat2d::zero());
  flat.context = ImmersionContext::make(false, 0.0);
  const FrameField fframe = orthonormal_frame(flat.patch);
  CHECK(killing_rhs(flat, fframe, rep, 0, 0.5, 0.5).norm() == 0.0);
}

TEST_CASE("transport matches the restriction oracle on flat-model presets") {
  // The field induced by a constant ambient spinor satisfies the same
  // first-order system; integrating from its corner value must reproduce it.
  for (const char* name : {"round-sphere-r3", "hyperbolic-plane-r21",
                           "de-sitter-r21", "anti-sphere-r03"}) {
    INFO(name);
    const ImmersedSurface s = load_preset(name);
    const Grid grid{33, 33, s.patch.dom};
    Spinor seed{1.0, 0.0};
    if (Signature::surface(orthonormal_frame(s.patch).eps[0],
                           orthonormal_frame(s.patch).eps[1])
            .q() == 1)
      seed = Spinor{cplx(0.9, 0.1), cplx(0.6, -0.2)};
    const auto oracle = oracles::restriction_field(s, grid, seed);
    auto data = SpecialKillingData::from_surface(
        s, oracle.field.values[grid.index(0, 0)], oracle.branch);
    const TransportResult res = transport_solve(data, grid, 4);
    double worst = 0;
    for (int k = 0; k < grid.size(); ++k)
      worst = std::max(worst, dist(res.field.values[k], oracle.field.values[k]));
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("sphere transport: residuals and refinement order") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  auto data = SpecialKillingData::from_surface(s, {1.0, 0.0}, +1);
  double killing[3];
  int idx = 0;
  for (int n : {32, 64, 128}) {
    const Grid grid{n, n, s.patch.dom};
    const TransportResult res = transport_solve(data, grid);
    killing[idx++] = res.killing_residual;
    if (n == 64) {
      CHECK(res.killing_residual < 1e-6);
      CHECK(res.holonomy_defect < 1e-9);
      CHECK(dirac_residual(res, data, DiracCoefficients::frozen()) < 1e-6);
      // the rejected coefficient pair differs by eps H phi = O(1)
      CHECK(dirac_residual(res, data, DiracCoefficients::theorem_statement()) > 0.5);
    }
  }
  CHECK(convergence_order(killing[0], killing[1]) > 3.5);
  CHECK(convergence_order(killing[1], killing[2]) > 3.5);
}

TEST_CASE("norm behavior: |phi|^2 is constant for (2,0), eps = 1, lambda = 0") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  auto data = SpecialKillingData::from_surface(s, {1.0, 0.0}, +1);
  double defect[2];
  int idx = 0;
  for (int n : {33, 65}) {
    const Grid grid{n, n, s.patch.dom};
    const TransportResult res = transport_solve(data, grid);
    double worst = 0;
    for (const auto& v : res.field.values)
      worst = std::max(worst, std::abs(v.norm() - 1.0));
    defect[idx++] = worst;
  }
  CHECK(defect[1] < 1e-8);
  CHECK(convergence_order(defect[0], defect[1]) > 3.5);
}

TEST_CASE("(1,1) transport keeps the base spinor non-isotropic") {
  const ImmersedSurface s = load_preset("de-sitter-r21");
  const FrameField frame = orthonormal_frame(s.patch);
  const Signature sig = Signature::surface(frame.eps[0], frame.eps[1]);
  auto data = SpecialKillingData::from_surface(
      s, default_base_spinor(sig, +1), +1);
  const Grid grid{48, 48, s.patch.dom};
  const TransportResult res = transport_solve(data, grid);
  const cplx base = half_spinor_pairing(res.field.rep, data.base_spinor);
  double mn = 1e300;
  for (const auto& v : res.field.values)
    mn = std::min(mn, std::abs(half_spinor_pairing(res.field.rep, v)));
  CHECK(mn >= 0.5 * std::abs(base));
}

TEST_CASE("a non-Codazzi shape operator obstructs the integration") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const ImmersedSurface p = perturb_shape(s, 0.01);
  auto data = SpecialKillingData::from_surface(p, {1.0, 0.0}, +1);
  double defect[3];
  int idx = 0;
  for (int n : {32, 64, 128}) {
    const Grid grid{n, n, p.patch.dom};
    defect[idx++] = transport_solve(data, grid).holonomy_defect;
  }
  CHECK(defect[0] > 1e-3);
  CHECK(defect[1] > 1e-3);
  CHECK(defect[2] > 1e-3);
  // and it does not shrink under refinement
  CHECK(defect[2] > 0.5 * defect[0]);
}

TEST_CASE("designated transport errors") {
  // isotropic base spinor on (1,1)
  const ImmersedSurface dS = load_preset("de-sitter-r21");
  auto bad = SpecialKillingData::from_surface(dS, {1.0, 0.0}, +1);
  const Grid grid{16, 16, dS.patch.dom};
  CHECK_THROWS_AS(transport_solve(bad, grid), Error);
  try {
    transport_solve(bad, grid);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::isotropic_base_spinor);
  }

  // runaway growth trips the overflow guard (Lorentzian transport with a
  // large shape operator grows exponentially)
  SpecialKillingData runaway;
  runaway.patch = oracles::flat_patch(1, -1);
  runaway.shape = AField::constant(Mat2d::diag(60.0, 60.0));
  runaway.context = ImmersionContext::make(false, 0.0);
  runaway.base_spinor = default_base_spinor(Signature::surface(1, -1), +1);
  CHECK_THROWS_AS(transport_solve(runaway, Grid{16, 16, runaway.patch.dom}), Error);
  try {
    transport_solve(runaway, Grid{16, 16, runaway.patch.dom});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::step_unstable);
  }
}

TEST_CASE("spinor field CSV has the documented columns") {
  const ImmersedSurface s = load_preset("flat-plane-r3");
  auto data = SpecialKillingData::from_surface(s, {1.0, 0.0}, +1);
  const Grid grid{8, 8, s.patch.dom};
  const TransportResult res = transport_solve(data, grid);
  const std::string csv = csv_spinor_field(res.field);
  CHECK(csv.rfind("u,v,re_plus,im_plus,re_minus,im_minus\n", 0) == 0);
}
