#include <catch_amalgamated.hpp>

#include <random>

#include "spinsurf/clifford.hpp"

using namespace spinsurf;

namespace {

const Signature kSurfaces[4] = {Signature::surface(1, 1), Signature::surface(1, -1),
                                Signature::surface(-1, 1), Signature::surface(-1, -1)};

}  // namespace

TEST_CASE("surface representations satisfy the structural invariants") {
  for (const auto& sig : kSurfaces) {
    const GammaRep rep = build_rep(sig, CliffordConvention::frozen());
    for (int j = 0; j < 2; ++j) {
      const Mat2c sq = rep.gamma[j] * rep.gamma[j];
      CHECK(dist(sq, double(-sig.eps[j]) * Mat2c::identity()) < 1e-14);
    }
    const Mat2c anti = rep.gamma[0] * rep.gamma[1] + rep.gamma[1] * rep.gamma[0];
    CHECK(anti.norm() < 1e-14);
    CHECK(dist(rep.omega, Mat2c::diag(1.0, -1.0)) < 1e-14);
    CHECK(dist(rep.omega * rep.omega, Mat2c::identity()) < 1e-14);
    // Sigma^{+-} projectors are idempotent and complementary.
    const Mat2c pp = 0.5 * (Mat2c::identity() + rep.omega);
    const Mat2c pm = 0.5 * (Mat2c::identity() - rep.omega);
    CHECK(dist(pp * pp, pp) < 1e-15);
    CHECK(dist(pm * pm, pm) < 1e-15);
    CHECK(dist(pp + pm, Mat2c::identity()) < 1e-15);
    // Adjointness pattern: skew on positive definite, symmetric otherwise.
    const int want = sig.q() == 0 ? -1 : 1;
    for (int j = 0; j < 2; ++j)
      CHECK(dist(rep.gamma[j].adjoint() * rep.h,
                 double(want) * (rep.h * rep.gamma[j])) < 1e-14);
  }
}

TEST_CASE("explicit sigma = +1 build flips the squares") {
  const GammaRep rep = build_rep(Signature::surface(1, 1), {+1, -1});
  CHECK(dist(rep.gamma[0] * rep.gamma[0], Mat2c::identity()) < 1e-14);
  CHECK(dist(rep.gamma[1] * rep.gamma[1], Mat2c::identity()) < 1e-14);
  CHECK(dist(rep.omega, Mat2c::diag(1.0, -1.0)) < 1e-14);

  const GammaRep lor = build_rep(Signature::surface(1, -1), {+1, -1});
  CHECK(dist(lor.gamma[0] * lor.gamma[0], Mat2c::identity()) < 1e-14);
  CHECK(dist(lor.gamma[1] * lor.gamma[1], -1.0 * Mat2c::identity()) < 1e-14);
}

TEST_CASE("ambient representation carries a unit scalar volume element") {
  // (2,1) with the frozen convention: omega = -i gamma1 gamma2 gamma3 with
  // omega^2 = Id, acting as the frozen scalar.
  const GammaRep rep =
      build_rep(Signature::ambient(1, 1, -1), CliffordConvention::frozen());
  CHECK(dist(rep.omega * rep.omega, Mat2c::identity()) < 1e-14);
  CHECK(rep.ambient_volume_sign == kAmbientVolumeSign);
  for (int j = 0; j < 3; ++j) {
    const Mat2c sq = rep.gamma[j] * rep.gamma[j];
    const int eps_j = (j == 2) ? -1 : 1;
    CHECK(dist(sq, double(-eps_j) * Mat2c::identity()) < 1e-14);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      CHECK((rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a]).norm() <
            1e-14);
}

TEST_CASE("clifford_mul squares, anticommutes and rotates half-spinors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const auto& sig : kSurfaces) {
    const GammaRep rep = build_rep(sig, CliffordConvention::frozen());
    for (int k = 0; k < 32; ++k) {
      const std::array<double, 2> v{U(rng), U(rng)};
      const std::array<double, 2> w{U(rng), U(rng)};
      const Spinor phi{{U(rng), U(rng)}, {U(rng), U(rng)}};
      const double gvv = sig.eps[0] * v[0] * v[0] + sig.eps[1] * v[1] * v[1];
      const double gvw = sig.eps[0] * v[0] * w[0] + sig.eps[1] * v[1] * w[1];
      const Spinor vv = clifford_mul(rep, v, clifford_mul(rep, v, phi));
      CHECK(dist(vv, -gvv * phi) < 1e-13);
      // v.w + w.v = 2 sigma g(v,w)
      const Spinor sym = clifford_mul(rep, v, clifford_mul(rep, w, phi)) +
                         clifford_mul(rep, w, clifford_mul(rep, v, phi));
      CHECK(dist(sym, -2.0 * gvw * phi) < 1e-13);
    }
    // Vectors swap the omega eigenspaces.
    const Spinor plus{1.0, 0.0};
    const Spinor image = clifford_mul(rep, {1.0, 0.0}, plus);
    CHECK(std::abs(image.plus) < 1e-15);
  }

  // e1.(e2.phi) + e2.(e1.phi) = 0 and the omega action on (2,0):
  // e1.e2.phi = -i bar(phi).
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  const Spinor phi{{0.3, -0.2}, {0.8, 0.5}};
  const Spinor lhs = clifford_mul(rep, {1, 0}, clifford_mul(rep, {0, 1}, phi));
  CHECK(dist(lhs, cplx(0, -1) * bar_conjugate(rep, phi)) < 1e-15);
}

TEST_CASE("split and bar conjugation") {
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  const Spinor pure_plus{1.0, 0.0};
  auto [p1, m1] = split_spinor(rep, pure_plus);
  CHECK(dist(p1, pure_plus) < 1e-15);
  CHECK(m1.norm() < 1e-15);
  CHECK(dist(bar_conjugate(rep, pure_plus), pure_plus) < 1e-15);

  const Spinor pure_minus{0.0, 1.0};
  CHECK(dist(bar_conjugate(rep, pure_minus), Spinor{0.0, -1.0}) < 1e-15);

  const Spinor phi{{0.2, 0.7}, {-0.4, 0.1}};
  auto [p, m] = split_spinor(rep, phi);
  CHECK(dist(p + m, phi) < 1e-15);
  CHECK(dist(rep.omega * p, p) < 1e-15);
  CHECK(dist(rep.omega * m, -m) < 1e-15);
  CHECK(dist(bar_conjugate(rep, bar_conjugate(rep, phi)), phi) < 1e-15);
}

TEST_CASE("the pairing has the documented structure") {
  // (1,1): only the cross blocks pair; pure half-spinors are isotropic.
  const GammaRep lor = build_rep(Signature::surface(1, -1), CliffordConvention::frozen());
  const Spinor phi{1.0, 0.0}, psi{0.0, 1.0};
  CHECK(std::abs(inner_product(lor, phi, psi)) > 0.5);
  CHECK(std::abs(inner_product(lor, phi, phi)) < 1e-15);
  CHECK(std::abs(inner_product(lor, psi, psi)) < 1e-15);

  // (2,0): h = Id, definite.
  const GammaRep rie = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  const Spinor chi{{0.3, 0.1}, {-0.2, 0.9}};
  const cplx n = inner_product(rie, chi, chi);
  CHECK(n.real() > 0);
  CHECK(std::abs(n.imag()) < 1e-15);

  // <phi, e1.e2.phi> has no real part in any signature (the pairing step
  // used when the Dirac term drops out of the beta computation).
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  for (const auto& sig : kSurfaces) {
    const GammaRep rep = build_rep(sig, CliffordConvention::frozen());
    for (int k = 0; k < 16; ++k) {
      const Spinor a{{U(rng), U(rng)}, {U(rng), U(rng)}};
      const Spinor e12a =
          clifford_mul(rep, {1, 0}, clifford_mul(rep, {0, 1}, a));
      CHECK(std::abs(inner_product(rep, a, e12a).real()) < 1e-14);
    }
  }
}

TEST_CASE("dimension mismatch is rejected") {
  const GammaRep rep = build_rep(Signature::surface(1, 1), CliffordConvention::frozen());
  const double v3[3] = {1, 0, 0};
  CHECK_THROWS_AS(clifford_matrix(rep, v3, 3), Error);
}

TEST_CASE("convention audit freezes exactly one convention") {
  const AuditReport rep = convention_audit(0x5eed2024ull, 128, 1e-12);
  CHECK(rep.unique);
  CHECK(rep.frozen.sigma == -1);
  CHECK(rep.frozen.tau == -1);
  CHECK(rep.frozen_zeta == -1);

  for (const auto& cand : rep.candidates) {
    const bool is_frozen = cand.convention.sigma == rep.frozen.sigma &&
                           cand.convention.tau == rep.frozen.tau;
    CHECK(cand.pass_all == is_frozen);
    if (is_frozen) {
      for (const auto& row : cand.rows[0]) {  // zeta = -1 table
        CHECK(row.res_identification <= 1e-12);
        CHECK(row.res_volume_chain <= 1e-12);
        CHECK(row.res_six_case <= 1e-12);
        CHECK(row.res_adjointness <= 1e-12);
        CHECK(row.res_omega <= 1e-12);
        // the printed intermediate chain belongs to the other module
        CHECK(row.res_volume_chain_printed > 0.1);
      }
    } else {
      // every other convention breaks at O(1) somewhere in every zeta table
      for (int zi = 0; zi < 2; ++zi) {
        double worst = 0;
        for (const auto& row : cand.rows[zi])
          worst = std::max({worst, row.res_identification, row.res_six_case,
                            row.res_adjointness, row.res_omega});
        CHECK(worst > 0.1);
      }
    }
  }
}

TEST_CASE("audit is reproducible for a fixed seed") {
  const AuditReport a = convention_audit(42, 128, 1e-12);
  const AuditReport b = convention_audit(42, 128, 1e-12);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (size_t i = 0; i < a.candidates.size(); ++i)
    for (int zi = 0; zi < 2; ++zi)
      for (size_t r = 0; r < a.candidates[i].rows[zi].size(); ++r) {
        CHECK(a.candidates[i].rows[zi][r].res_six_case ==
              b.candidates[i].rows[zi][r].res_six_case);
        CHECK(a.candidates[i].rows[zi][r].res_volume_chain ==
              b.candidates[i].rows[zi][r].res_volume_chain);
      }
}
