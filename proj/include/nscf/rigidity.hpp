#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nscf/birkhoff_graph.hpp"
#include "nscf/function_space.hpp"

namespace nscf {

// Square matrix acting on coefficient vectors.
using OperatorMatrix = CMat;

struct MoDetection {
  bool is_mo = false;
  std::vector<cplx> omega;               // per point; 0 where the evaluation vanishes
  std::vector<std::size_t> null_points;  // points with x_F = 0 (omega undefined)
  std::optional<std::size_t> failing_point;
  double max_residual = 0.0;  // relative, in the dual-view norm
};

// Tests whether every nonzero point evaluation is an eigenvector of the
// transpose of T, i.e. T is multiplication by the returned weight.
MoDetection detect_mo(const FunctionSpaceModel& F, const OperatorMatrix& T, double tol = 1e-9);

struct MoFromWeight {
  std::optional<OperatorMatrix> T;  // absent when omega is not a multiplier
  // || diag(w) B - B T ||_F with unit-norm basis columns, relative to
  // sqrt(k) max(1, |w|)
  double residual = 0.0;
};

// Least-squares solve of diag(omega) B = B T.
MoFromWeight mo_from_weight(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                            double tol = 1e-9);

struct IsometryMode {
  enum class Kind { ExactHilbert, Sampled };
  Kind kind = Kind::Sampled;
  int samples = 500;
  std::uint64_t seed = 1;

  static IsometryMode exact_hilbert() { return {Kind::ExactHilbert, 0, 0}; }
  static IsometryMode sampled(int n, std::uint64_t seed = 1) { return {Kind::Sampled, n, seed}; }
};

struct IsometryEvidence {
  std::string method;  // "exact_hilbert", "structural" or "sampled"
  bool exact = false;  // a certificate rather than sampled evidence
  bool isometric = false;
  int samples = 0;
  double max_deviation = 0.0;
  double condition = 0.0;
  bool invertible = false;  // condition number <= 1e8

  bool unitary() const { return isometric && invertible; }
};

// ExactHilbert checks T* G T = G (needs a Hilbertian coefficient norm).
// Sampled draws random vectors; for Lp norms a unimodular generalized
// permutation matrix is additionally certified exactly.
IsometryEvidence is_isometry(const FunctionSpaceModel& F, const OperatorMatrix& T,
                             IsometryMode mode, double tol = 1e-9);
IsometryEvidence is_isometry(const NormSpec& norm, const OperatorMatrix& T, IsometryMode mode,
                             double tol = 1e-9);

struct ComponentLambda {
  std::vector<std::size_t> members;
  cplx lambda{0.0, 0.0};
  double spread = 0.0;  // max |omega(x) - omega(y)| within the component
};

struct Verdict {
  enum class Kind { Scalar, NonScalarWitness };
  Kind kind = Kind::Scalar;
  cplx lambda{0.0, 0.0};  // Scalar
  // NonScalarWitness: two components with different values.
  std::size_t component_a = 0;
  std::size_t component_b = 0;
  cplx lambda_a{0.0, 0.0};
  cplx lambda_b{0.0, 0.0};

  bool scalar() const { return kind == Kind::Scalar; }
};

const char* to_string(Verdict::Kind k);

struct Propagation {
  std::vector<ComponentLambda> components;
  Verdict verdict;
};

// Eigenvalue bookkeeping over graph components. lambda is the component
// mean, renormalized to modulus one when `unimodular`. Throws
// InconsistentComponent, naming an edge and its margins, when omega varies
// by more than tol * max|omega| inside a component.
Propagation propagate_eigenvalues(const BirkhoffGraph& g, const std::vector<cplx>& omega,
                                  double tol = kDefaultOrthoTol, bool unimodular = false);

struct RigidityReport {
  std::vector<std::string> points;
  std::vector<cplx> omega;
  std::vector<ComponentLambda> components;
  Verdict verdict;
  IsometryEvidence isometry;
  std::size_t edges = 0;
  std::size_t soft_edges = 0;
  double max_weight_deviation = 0.0;  // max |omega(x) - lambda(component of x)|
  std::optional<std::size_t> core_dim;
  std::optional<std::size_t> n_star;
};

// Full pipeline for a weight: multiplier check, unitarity (exact for
// Hilbertian norms, sampled otherwise), Birkhoff graph, propagation.
// Throws NotMultiplier or NotIsometric.
RigidityReport rigidity_verdict(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                                double tol = kDefaultOrthoTol);
// Same starting from an operator; throws NotMultiplier if detect_mo fails.
RigidityReport rigidity_verdict_operator(const FunctionSpaceModel& F, const OperatorMatrix& T,
                                         double tol = kDefaultOrthoTol);

struct WcoResult {
  std::vector<std::size_t> image;  // F-points hit by Phi
  std::vector<cplx> ratio;         // upsilon / omega per image point
  std::vector<ComponentLambda> components;
  bool connected = false;
  std::optional<cplx> lambda;  // upsilon = lambda omega when all components agree
  IsometryEvidence isometry;   // evidence for S
};

// Given W_{Phi,omega} = W_{Phi,upsilon} S with S isometric, recovers the
// ratio upsilon / omega over Phi's image and propagates it through the
// Birkhoff graph of F on that image. `phi[y]` is the F-point index of Phi(y).
// Throws IdentityViolated, ZeroVector (vanishing weights),
// InconsistentComponent or NotIsometric.
WcoResult wco_compare(const FunctionSpaceModel& F, const FunctionSpaceModel& E,
                      const std::vector<std::size_t>& phi, const std::vector<cplx>& omega,
                      const std::vector<cplx>& upsilon, const OperatorMatrix& S,
                      double tol = kDefaultOrthoTol);

// Matrix of f -> omega (f o Phi) from coefficients of F to coefficients of E.
std::optional<CMat> weighted_composition(const FunctionSpaceModel& F, const FunctionSpaceModel& E,
                                         const std::vector<std::size_t>& phi,
                                         const std::vector<cplx>& omega, double tol = 1e-9);

struct CoreResult {
  CMat basis;                      // orthonormal columns spanning the core
  std::size_t n_star = 0;          // first n with range(M^n) = range(M^(n+1))
  std::vector<std::size_t> dims;   // dims[n] = dim range(M^n), dims[0] = k
  std::vector<CMat> ranges;        // orthonormal bases of range(M^n), n = 0..
  bool stabilized = false;
};

CoreResult invariant_core(const OperatorMatrix& M, std::size_t n_max);
CoreResult invariant_core(const FunctionSpaceModel& F, const OperatorMatrix& M, std::size_t n_max);

// Rigidity on the invariant core of M_omega, which may be non-invertible.
// Throws VacuousCore when the core is {0}.
RigidityReport isometry_rigidity(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                                 double tol = kDefaultOrthoTol, std::size_t n_max = 0);
RigidityReport isometry_rigidity_operator(const FunctionSpaceModel& F, const OperatorMatrix& T,
                                          double tol = kDefaultOrthoTol, std::size_t n_max = 0);

// Model of the functions with coefficients in span(V), V orthonormal.
// Points whose evaluations vanish on the span are dropped.
FunctionSpaceModel restrict_to_subspace(const FunctionSpaceModel& F, const CMat& V);

}  // namespace nscf
