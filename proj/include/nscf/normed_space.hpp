#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nscf/types.hpp"

namespace nscf {

class NormSpec;

// Outer norm rho used to glue block norms together:
// rho(r) = (sum_n w_n r_n^p)^(1/p), or max_n w_n r_n for p = inf.
struct RhoCombiner {
  double p = 2.0;
  std::vector<double> weights;  // empty means unit weights

  static RhoCombiner outer_lp(double p);
  static RhoCombiner weighted_outer_lp(double p, std::vector<double> weights);

  bool weighted() const { return !weights.empty(); }
  double weight(std::size_t n) const { return weights.empty() ? 1.0 : weights[n]; }
  double combine(std::span<const double> r) const;
  double dual_combine(std::span<const double> s) const;
};

// Immutable, cheaply copyable description of a norm on coordinate space.
class NormSpec {
 public:
  enum class Kind { Lp, HilbertGram, Polyhedral, LipschitzFin, BlockSum };

  // p in [1, inf]; use std::numeric_limits<double>::infinity() for sup norm.
  static NormSpec lp(double p, std::size_t dim);
  // Hermitian positive-definite Gram matrix, ||v||^2 = v* G v.
  static NormSpec hilbert(const CMat& gram);
  // Real space R^d with ||x|| = max_j <a_j, x>; rows of `facets` are the a_j.
  static NormSpec polyhedral(const RMat& facets);
  // Lipschitz functions on a finite metric space. With the basepoint
  // penalized, ||f|| = dil f + |f(z)| on all points; otherwise f(z) = 0 and
  // the basepoint coordinate is dropped, ||f|| = dil f.
  static NormSpec lipschitz(const RMat& metric, std::size_t basepoint,
                            bool penalize_basepoint);
  static NormSpec block_sum(std::vector<NormSpec> blocks, RhoCombiner combiner);

  Kind kind() const;
  std::size_t dim() const;
  // Scalars are real (polyhedral norms, or block sums containing one).
  bool real_scalars() const;
  // ||conj(v)|| = ||v|| for every v.
  bool conjugation_symmetric() const;

  double p() const;
  const CMat& gram() const;
  const CMat& gram_inverse() const;
  const RMat& facets() const;
  const RMat& metric() const;
  std::size_t basepoint() const;
  bool penalize_basepoint() const;
  std::size_t num_points() const;
  const std::vector<NormSpec>& blocks() const;
  const RhoCombiner& combiner() const;
  const std::vector<std::size_t>& block_offsets() const;

  // Implementation state; the definition is private to the library.
  struct Data;
  const Data& data() const { return *d_; }

 private:
  explicit NormSpec(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

const char* to_string(NormSpec::Kind kind);

double norm_eval(const NormSpec& spec, const CVec& v);

// Dilation sup |f(x) - f(y)| / d(x, y) over distinct points.
double dil(const RMat& metric, const CVec& f);

// sup over ||f|| <= 1 of |<f, phi>|.
double dual_norm_eval(const NormSpec& spec, const Functional& phi,
                      double tol = kDefaultTol);

// Norming functionals of e: {nu in dual ball : <e, nu> = ||e||}.
struct SupportFace {
  std::vector<Functional> extreme;  // extreme points (or a sample of them)
  bool unique = false;
  bool approximate = false;
};

SupportFace support_face(const NormSpec& spec, const CVec& e,
                         double tol = kDefaultTol);

// Real affine dimension of the norming set of e. Exact for Lp, HilbertGram
// and Polyhedral; other variants throw ErrorCode::Unsupported.
std::size_t face_dimension(const NormSpec& spec, const CVec& e,
                           double tol = kDefaultTol);

// Real affine dimension of the largest convex subset of the unit sphere
// containing e (which must have norm 1).
std::size_t sphere_face_dimension(const NormSpec& spec, const CVec& e,
                                  double tol = kDefaultTol);

// Throws InvalidMetric unless `metric` is square, symmetric, zero on the
// diagonal, positive off it, and satisfies the triangle inequality.
void validate_metric(const RMat& metric);

// Gram matrix G with ||v||^2 = v* G v when the norm is Hilbertian
// (HilbertGram, Lp(2), one-dimensional Lp, or an outer-l2 block sum of
// Hilbertian blocks).
std::optional<CMat> hilbert_gram_equivalent(const NormSpec& spec);

// Real affine dimension of a point set (complex points use their real
// embedding).
std::size_t affine_dimension(const std::vector<CVec>& points, double tol = 1e-9);

}  // namespace nscf
