#pragma once

#include <cstddef>

#include "nscf/normed_space.hpp"

namespace nscf {

// A norm as seen by the orthogonality routines: either the primal norm of a
// spec, or its dual norm acting on functionals (coefficient vectors).
struct NormView {
  NormSpec spec;
  bool dual = false;
  double tol = kDefaultTol;  // accuracy forwarded to dual_norm_eval

  static NormView primal(NormSpec s) { return {std::move(s), false, kDefaultTol}; }
  static NormView dual_of(NormSpec s, double tol = kDefaultTol) {
    return {std::move(s), true, tol};
  }

  std::size_t dim() const { return spec.dim(); }
  double norm(const CVec& v) const;
  bool real_scalars() const { return spec.real_scalars(); }
  bool conjugation_symmetric() const { return spec.conjugation_symmetric(); }
};

struct LineMinResult {
  cplx t_star{0.0, 0.0};
  double value = 0.0;
  int iterations = 0;   // norm evaluations
  bool certified = false;
};

// Minimize t -> ||e + t f|| over scalar t, within additive tol * ||e||.
LineMinResult min_norm_over_line(const NormView& view, const CVec& e, const CVec& f,
                                 double tol = kDefaultTol);
LineMinResult min_norm_over_line(const NormSpec& spec, const CVec& e, const CVec& f,
                                 double tol = kDefaultTol);

enum class Orthogonality { Orthogonal, Indeterminate, NotOrthogonal };
const char* to_string(Orthogonality o);

struct OrthoDecision {
  Orthogonality verdict = Orthogonality::NotOrthogonal;
  double norm_e = 0.0;
  // min_t ||e + t f|| / ||e|| - 1; never positive. Orthogonal when >= -tol,
  // indeterminate in [-10 tol, -tol).
  double margin = 0.0;
  LineMinResult line;
};

OrthoDecision classify_orthogonality(const NormView& view, const CVec& e, const CVec& f,
                                     double tol = kDefaultOrthoTol);

// e is Birkhoff orthogonal to f: ||e|| <= ||e + t f|| for every scalar t.
bool is_birkhoff_orthogonal(const NormView& view, const CVec& e, const CVec& f,
                            double tol = kDefaultOrthoTol);
bool is_birkhoff_orthogonal(const NormSpec& spec, const CVec& e, const CVec& f,
                            double tol = kDefaultOrthoTol);

struct DualOrthoResult {
  bool orthogonal = false;
  // Distance from 0 to {<f, nu> : nu norming e}, divided by ||f||.
  double slack = 0.0;
};

// Dual test: some norming functional of e annihilates f. Exact for Lp,
// HilbertGram and Polyhedral specs; other variants throw Unsupported.
DualOrthoResult birkhoff_dual_test(const NormSpec& spec, const CVec& e, const CVec& f,
                                   double tol = kDefaultOrthoTol);
bool is_birkhoff_orthogonal_dual(const NormSpec& spec, const CVec& e, const CVec& f,
                                 double tol = kDefaultOrthoTol);

struct IsoortReport {
  bool is_isometry_on_samples = false;
  double isometry_deviation = 0.0;
  cplx alpha{0.0, 0.0};
  bool unimodular = false;  // |alpha| = |beta| = 1 within tol
  cplx beta{0.0, 0.0};
  bool e_orth_f = false;
  bool f_orth_e = false;
  double margin_ef = 0.0;
  double margin_fe = 0.0;

  bool passed() const { return e_orth_f && f_orth_e; }
};

// For eigenvectors e, f of T with distinct eigenvalues, report the
// eigenvalues, a sampled isometry check, and both orthogonality verdicts.
IsoortReport lemma_isoort_check(const NormSpec& spec, const CMat& T, const CVec& e,
                                const CVec& f, double tol = kDefaultOrthoTol);

}  // namespace nscf
