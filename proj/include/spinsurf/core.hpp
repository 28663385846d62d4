#pragma once

// Core scalar types, signatures, immersion context, tolerances and errors
// shared by every spinsurf module.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace spinsurf {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
  invalid_signature,
  no_representation,
  dimension_mismatch,
  degenerate_chart,
  grid_too_coarse,
  unknown_preset,
  normal_degenerate,
  isotropic_base_spinor,
  isotropic_spinor,
  vanishing_half_spinor,
  step_unstable,
  dirac_residual_too_large,
  norm_assumption_violated,
  case_undetermined,
  integrability_violated,
  frame_drift,
  shape_mismatch,
  audit_inconclusive,
  bad_config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_signature: return "invalid-signature";
    case Errc::no_representation: return "no-representation";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::degenerate_chart: return "degenerate-chart";
    case Errc::grid_too_coarse: return "grid-too-coarse";
    case Errc::unknown_preset: return "unknown-preset";
    case Errc::normal_degenerate: return "normal-degenerate";
    case Errc::isotropic_base_spinor: return "isotropic-base-spinor";
    case Errc::isotropic_spinor: return "isotropic-spinor";
    case Errc::vanishing_half_spinor: return "vanishing-half-spinor";
    case Errc::step_unstable: return "step-unstable";
    case Errc::dirac_residual_too_large: return "dirac-residual-too-large";
    case Errc::norm_assumption_violated: return "norm-assumption-violated";
    case Errc::case_undetermined: return "case-undetermined";
    case Errc::integrability_violated: return "integrability-violated";
    case Errc::frame_drift: return "frame-drift";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::audit_inconclusive: return "audit-inconclusive";
    case Errc::bad_config: return "bad-config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

// Ordered list of frame-vector signs eps_j = g(e_j, e_j).  Dimension 2 for
// surfaces, 3 for the ambient algebra.  The order matters: chart frames can
// put the timelike direction first (de Sitter charts do).
struct Signature {
  int dim = 2;
  std::array<int, 3> eps{1, 1, 1};

  static Signature surface(int e1, int e2) {
    Signature s;
    s.dim = 2;
    s.eps = {e1, e2, 0};
    s.validate();
    return s;
  }
  static Signature ambient(int e1, int e2, int e3) {
    Signature s;
    s.dim = 3;
    s.eps = {e1, e2, e3};
    s.validate();
    return s;
  }

  int p() const {
    int n = 0;
    for (int j = 0; j < dim; ++j) n += (eps[j] > 0);
    return n;
  }
  int q() const { return dim - p(); }

  void validate() const {
    if (dim != 2 && dim != 3)
      fail(Errc::invalid_signature, "dimension must be 2 or 3");
    for (int j = 0; j < dim; ++j)
      if (eps[j] != 1 && eps[j] != -1)
        fail(Errc::invalid_signature, "eps entries must be +1 or -1");
  }

  bool operator==(const Signature& o) const {
    if (dim != o.dim) return false;
    for (int j = 0; j < dim; ++j)
      if (eps[j] != o.eps[j]) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Immersion context
// ---------------------------------------------------------------------------

// epsilon = 1 for spacelike immersions (unit normal with <nu,nu> = +1),
// epsilon = i for timelike ones (<nu,nu> = -1).  kappa = 4 lambda^2 exactly.
struct ImmersionContext {
  cplx epsilon{1.0, 0.0};
  cplx lambda{0.0, 0.0};
  double kappa = 0.0;

  bool timelike() const { return std::abs(epsilon.real()) < 0.5; }
  // epsilon^2 as a real sign: +1 spacelike, -1 timelike.
  double eps2() const { return timelike() ? -1.0 : 1.0; }

  static ImmersionContext make(bool is_timelike, cplx lambda_) {
    ImmersionContext c;
    c.epsilon = is_timelike ? cplx(0, 1) : cplx(1, 0);
    c.lambda = lambda_;
    cplx k = 4.0 * lambda_ * lambda_;
    if (std::abs(k.imag()) > 1e-14)
      fail(Errc::bad_config, "lambda must be real or purely imaginary");
    c.kappa = k.real();
    return c;
  }
};

// lambda class used by the Lemma 2 branch dispatch: whether i*lambda/epsilon
// is real or purely imaginary (lambda = 0 belongs to both).
enum class LambdaClass { zero, ilambda_over_eps_real, ilambda_over_eps_imag };

inline LambdaClass classify_lambda(const ImmersionContext& ctx,
                                   double tol = 1e-12) {
  cplx w = cplx(0, 1) * ctx.lambda / ctx.epsilon;
  bool re0 = std::abs(w.real()) <= tol;
  bool im0 = std::abs(w.imag()) <= tol;
  if (re0 && im0) return LambdaClass::zero;
  if (im0) return LambdaClass::ilambda_over_eps_real;
  if (re0) return LambdaClass::ilambda_over_eps_imag;
  fail(Errc::case_undetermined,
       "lambda/epsilon is neither real nor purely imaginary");
}

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

struct Tolerances {
  double audit = 1e-12;
  double metric_match = 1e-12;
  double frame_tolerance = 1e-8;   // |g11| floor for the chart frame
  double gauss_equation = 1e-8;
  double gauss_codazzi = 1e-8;
  double dirac_residual = 1e-6;
  double killing_residual = 1e-6;
  double extract_rel = 1e-4;
  double trace_law = 1e-10;
  double align = 1e-6;
  double quadric = 1e-8;
  double integrability = 1e-6;
  double frame_drift = 1e-6;
  double pair_margin = 1e-8;
  double norm_assumption = 1e-6;
  double isotropy_guard = 1e-8;
  double half_spinor_guard = 1e-10;
  double case_eps = 1e-12;
  double obstruction = 1e-3;

  // CLI-facing override by key name.  Unknown keys are a config error.
  void set(const std::string& key, double value) {
    if (value <= 0) fail(Errc::bad_config, "tolerance must be positive: " + key);
    auto& m = fields();
    auto it = m.find(key);
    if (it == m.end()) fail(Errc::bad_config, "unknown tolerance key: " + key);
    this->*(it->second) = value;
  }

  static const std::map<std::string, double Tolerances::*>& fields() {
    static const std::map<std::string, double Tolerances::*> m = {
        {"audit", &Tolerances::audit},
        {"metric-match", &Tolerances::metric_match},
        {"frame-tolerance", &Tolerances::frame_tolerance},
        {"gauss-equation", &Tolerances::gauss_equation},
        {"gauss-codazzi", &Tolerances::gauss_codazzi},
        {"dirac-residual", &Tolerances::dirac_residual},
        {"killing-residual", &Tolerances::killing_residual},
        {"extract-rel", &Tolerances::extract_rel},
        {"trace-law", &Tolerances::trace_law},
        {"align", &Tolerances::align},
        {"quadric", &Tolerances::quadric},
        {"integrability", &Tolerances::integrability},
        {"frame-drift", &Tolerances::frame_drift},
        {"pair-margin", &Tolerances::pair_margin},
        {"norm-assumption", &Tolerances::norm_assumption},
        {"isotropy-guard", &Tolerances::isotropy_guard},
        {"half-spinor-guard", &Tolerances::half_spinor_guard},
        {"case-eps", &Tolerances::case_eps},
        {"obstruction", &Tolerances::obstruction},
    };
    return m;
  }
};

}  // namespace spinsurf
