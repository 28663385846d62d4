#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "spinsurf/ambient.hpp"
#include "spinsurf/reconstruct.hpp"

using namespace spinsurf;

TEST_CASE("every preset satisfies the catalog invariants") {
  for (const auto& name : preset_names()) {
    INFO(name);
    const ImmersedSurface s = load_preset(name);
    const Grid grid{17, 17, s.patch.dom};
    const PresetCheck chk = check_preset(s, grid);
    CHECK(chk.metric_match < 1e-12);
    CHECK(chk.normal_orthogonal < 1e-12);
    CHECK(chk.normal_unit < 1e-12);
    CHECK(chk.shape_match < 1e-10);
    CHECK(chk.shape_symmetry < 1e-10);
    CHECK(chk.quadric < 1e-12);
    CHECK(chk.gauss_equation < 1e-8);
    // H = -tr(A)/2 by construction of mean_curvature; spot-check a value
    const double u = 0.5 * (s.patch.dom.u0 + s.patch.dom.u1);
    const double v = 0.5 * (s.patch.dom.v0 + s.patch.dom.v1);
    CHECK(std::abs(s.shape.value(u, v).trace() + 2 * s.mean_curvature(u, v)) <
          1e-15);
  }
}

TEST_CASE("catalog fixtures carry the expected contexts") {
  struct Row {
    const char* name;
    int p, q;
    bool timelike;
    double kappa;
    int count;
    const char* kind;
  };
  const Row rows[] = {
      {"flat-plane-r3", 2, 0, false, 0.0, 1, "RSK"},
      {"round-sphere-r3", 2, 0, false, 0.0, 1, "RSK"},
      {"hyperbolic-plane-r21", 2, 0, true, 0.0, 2, "ISK"},
      {"de-sitter-r21", 1, 1, false, 0.0, 2, "RSK"},
      {"anti-hyperbolic-r12", 0, 2, false, 0.0, 2, "RSK"},
      {"anti-sphere-r03", 0, 2, true, 0.0, 1, "ISK"},
      {"geodesic-sphere-s3", 2, 0, false, 1.0, 1, "RSK"},
      {"geodesic-sphere-h3", 2, 0, false, -1.0, 1, "RSK"},
  };
  for (const auto& r : rows) {
    INFO(r.name);
    const ImmersedSurface s = load_preset(r.name);
    const FrameField frame = orthonormal_frame(s.patch);
    const Signature sig = Signature::surface(frame.eps[0], frame.eps[1]);
    CHECK(sig.p() == r.p);
    CHECK(sig.q() == r.q);
    CHECK(s.context.timelike() == r.timelike);
    CHECK(s.context.kappa == Catch::Approx(r.kappa).margin(1e-14));
    CHECK(std::abs(4.0 * s.context.lambda * s.context.lambda - s.context.kappa) <
          1e-14);
    const SpinorCount sc = spinor_count(sig.p(), sig.q(), s.context);
    CHECK(sc.count == r.count);
    CHECK(sc.kind == std::string(r.kind));
  }
}

TEST_CASE("round sphere: outward normal gives A = -Id and H = +1") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const FrameField frame = orthonormal_frame(s.patch);
  const Mat2d a = shape_from_embedding(s, frame, 1.1, 0.8);
  CHECK(dist(a, Mat2d::diag(-1.0, -1.0)) < 1e-12);
  CHECK(s.mean_curvature(1.1, 0.8) == Catch::Approx(1.0));
  // flat plane is totally geodesic
  const ImmersedSurface f = load_preset("flat-plane-r3");
  const FrameField ff = orthonormal_frame(f.patch);
  CHECK(shape_from_embedding(f, ff, 0.4, 0.6).norm() < 1e-14);
}

TEST_CASE("Weingarten route agrees with the second-fundamental-form route") {
  // g(A e_i, e_j) = sum c_i^a c_j^b <nu, d_a d_b x> , an independent check
  // through the embedding second partials.
  for (const auto& name : preset_names()) {
    INFO(name);
    const ImmersedSurface s = load_preset(name);
    const FrameField frame = orthonormal_frame(s.patch);
    const double u = 0.4 * s.patch.dom.u0 + 0.6 * s.patch.dom.u1;
    const double v = 0.3 * s.patch.dom.v0 + 0.7 * s.patch.dom.v1;
    const FramePoint fp = frame.at(u, v);
    const FlatVec nu = s.normal(u, v);
    const FlatVec xab[2][2] = {{s.embed_uu(u, v), s.embed_uv(u, v)},
                               {s.embed_uv(u, v), s.embed_vv(u, v)}};
    const Mat2d a = s.shape.value(u, v);
    const std::array<double, 2> c[2] = {fp.e1, fp.e2};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double ii = 0;
        for (int aa = 0; aa < 2; ++aa)
          for (int bb = 0; bb < 2; ++bb)
            ii += c[i][aa] * c[j][bb] * flat_inner(s.model, nu, xab[aa][bb]);
        const double lhs = frame.eps[j] * a(j, i);  // g(A e_i, e_j)
        CHECK(lhs == Catch::Approx(ii).margin(1e-9));
      }
  }
}

TEST_CASE("gauss equation is sensitive to shape perturbations") {
  const ImmersedSurface s = load_preset("de-sitter-r21");
  const Grid grid{17, 17, s.patch.dom};
  CHECK(gauss_equation_check(s, grid) < 1e-8);
  const ImmersedSurface p = perturb_shape(s, 0.01);
  CHECK(gauss_equation_check(p, grid) > 1e-3);
}

TEST_CASE("unknown presets and degenerate normals are rejected") {
  CHECK_THROWS_AS(load_preset("no-such-surface"), Error);

  // a null plane in R^{2,1}: normal candidate is lightlike
  ImmersedSurface s = load_preset("flat-plane-r3");
  s.model = {3, {1, 1, -1}};
  s.embed = [](double u, double v) { return FlatVec{u, v, v}; };
  s.embed_u = [](double, double) { return FlatVec{1, 0, 0}; };
  s.embed_v = [](double, double) { return FlatVec{0, 1, 1}; };
  s.normal = [](double, double) { return FlatVec{0, 1, 1}; };
  s.normal_u = [](double, double) { return FlatVec{0, 0, 0}; };
  s.normal_v = [](double, double) { return FlatVec{0, 0, 0}; };
  const FrameField frame = orthonormal_frame(s.patch);
  CHECK_THROWS_AS(shape_from_embedding(s, frame, 0.5, 0.5), Error);
}

TEST_CASE("surface CSV and OBJ exports") {
  const ImmersedSurface s = load_preset("round-sphere-r3");
  const Grid grid{9, 9, s.patch.dom};
  const std::string csv = csv_surface(s, grid);
  CHECK(csv.rfind("u,v,x0,x1,x2,nu0,nu1,nu2,A11,A12,A21,A22\n", 0) == 0);

  const EmbeddingGrid eg = preset_embedding_grid(s, grid);
  CHECK(csv_embedding(eg).rfind("u,v,x0,x1,x2\n", 0) == 0);
  const std::string obj = obj_embedding(eg);
  size_t vcount = 0, fcount = 0;
  for (size_t pos = 0; pos < obj.size(); ++pos)
    if (pos == 0 || obj[pos - 1] == '\n') {
      if (obj[pos] == 'v') ++vcount;
      if (obj[pos] == 'f') ++fcount;
    }
  CHECK(vcount == 81);
  CHECK(fcount == 64);

  // 4D quadric models cannot be exported as OBJ
  const ImmersedSurface q = load_preset("geodesic-sphere-s3");
  CHECK_THROWS_AS(obj_embedding(preset_embedding_grid(q, grid)), Error);
}
