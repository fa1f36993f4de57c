#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nscf/birkhoff.hpp"
#include "nscf/normed_space.hpp"

namespace nscf {

struct PhasePoint {
  std::string id;
  std::optional<cplx> coord;
};

// Finite sample of the phase space together with the proximity structure
// that stands in for its topology.
class PhaseSpace {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  // Points within distance epsilon of each other are neighbours.
  static PhaseSpace with_metric(std::vector<PhasePoint> points, RMat metric, double epsilon);
  static PhaseSpace with_adjacency(std::vector<PhasePoint> points, std::vector<Edge> edges);
  // No proximity information.
  static PhaseSpace bare(std::vector<PhasePoint> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<PhasePoint>& points() const { return points_; }
  const PhasePoint& point(std::size_t i) const { return points_.at(i); }
  std::size_t index_of(const std::string& id) const;
  std::vector<std::string> ids() const;

  bool has_metric() const { return metric_.has_value(); }
  const RMat& metric() const;
  double epsilon() const { return epsilon_; }
  bool has_adjacency() const { return adjacency_.has_value(); }
  const std::vector<Edge>& adjacency() const;

  // Neighbour pairs (i < j) of the proximity graph.
  std::vector<Edge> proximity_edges() const;
  std::vector<std::vector<std::size_t>> proximity_components() const;
  bool proximity_connected() const { return proximity_components().size() <= 1; }

 private:
  PhaseSpace() = default;
  void check_ids() const;

  std::vector<PhasePoint> points_;
  std::optional<RMat> metric_;
  double epsilon_ = 0.0;
  std::optional<std::vector<Edge>> adjacency_;
};

// Functions on the phase space represented by coefficient vectors c with
// values B c; the norm acts on coefficients.
class FunctionSpaceModel {
 public:
  // Throws NotIndependent unless B (points x k) has rank k.
  FunctionSpaceModel(PhaseSpace phase, CMat basis, NormSpec coeff_norm,
                     std::vector<std::string> flags = {});

  const PhaseSpace& phase() const { return phase_; }
  const CMat& basis() const { return basis_; }
  const NormSpec& coeff_norm() const { return norm_; }
  // Construction notes, e.g. a convention applied at a singular point.
  const std::vector<std::string>& flags() const { return flags_; }

  std::size_t num_points() const { return phase_.size(); }
  std::size_t dim() const { return norm_.dim(); }

 private:
  PhaseSpace phase_;
  CMat basis_;
  NormSpec norm_;
  std::vector<std::string> flags_;
};

// Row B_x as a functional on coefficients: <c, x_F> = (B c)_x.
Functional point_evaluation(const FunctionSpaceModel& F, const std::string& id);
Functional point_evaluation(const FunctionSpaceModel& F, std::size_t index);

struct OneIndependence {
  bool independent = true;
  std::vector<std::size_t> violating;  // points with a vanishing evaluation
};
OneIndependence is_1_independent(const FunctionSpaceModel& F, double tol = 1e-12);

struct TwoIndependence {
  bool independent = true;
  std::optional<std::pair<std::size_t, std::size_t>> violating;  // first dependent pair
};
TwoIndependence is_2_independent(const FunctionSpaceModel& F, double tol = 1e-9);

// Kernel bases built from omega(z) = z / |z| and e_n(z) = z omega(z)^n / 2^|n|.
struct KernelChoice {
  enum class Kind { Unilateral, Bilateral };
  Kind kind = Kind::Unilateral;
  int N = 1;

  static KernelChoice unilateral(int n) { return {Kind::Unilateral, n}; }
  static KernelChoice bilateral(int n) { return {Kind::Bilateral, n}; }
  int lowest() const { return kind == Kind::Unilateral ? 0 : -N; }
  std::size_t size() const { return static_cast<std::size_t>(N - lowest() + 1); }
};

cplx omega_unit(cplx z);  // z / |z|, and 1 at the origin
cplx kernel_basis_value(int n, cplx z);

// Orthonormal basis e_lowest..e_N sampled at `points` (closed unit disk).
// Proximity is the Euclidean metric with the given epsilon.
FunctionSpaceModel rkhs_from_kernel(const std::vector<cplx>& points, KernelChoice kernel,
                                    double epsilon = 0.5);

// sum_n e_n(z) conj(e_n(w)) over the basis of `kernel`.
cplx kernel_partial_sum(cplx z, cplx w, KernelChoice kernel);
// 4 z conj(w) / (4 |z| |w| - z conj(w)), the full unilateral kernel.
cplx kernel_closed_form(cplx z, cplx w);

// Delta basis on a finite metric space with the Lipschitz norm. Without the
// basepoint penalty f(basepoint) = 0 and that coefficient is dropped.
FunctionSpaceModel lipschitz_space(const RMat& metric, std::size_t basepoint, bool penalize,
                                   double epsilon = 0.5);

// Span of kernel sections k_x, x in the phase space, with the reproducing
// norm: basis B = K and Gram K, so point evaluations have dual inner
// products K(x, y) up to conjugation.
FunctionSpaceModel hilbert_kernel_model(PhaseSpace phase, const CMat& kernel);

// Dual norm acting on functionals; point evaluations live here.
NormView dual_space_view(const FunctionSpaceModel& F, double tol = kDefaultTol);

// Phase space on the listed points, keeping metric or adjacency.
PhaseSpace restrict_phase(const PhaseSpace& phase, const std::vector<std::size_t>& keep);

// Model restricted to the listed points (the basis must keep full rank).
FunctionSpaceModel restrict_points(const FunctionSpaceModel& F,
                                   const std::vector<std::size_t>& keep);

// Functions h on the disjoint union with h|_X in F, h|_Y in E and
// ||h|| = sqrt(||h|_X||^2 + ||h|_Y||^2). Point ids must be distinct.
FunctionSpaceModel disjoint_sum(const FunctionSpaceModel& F, const FunctionSpaceModel& E);

}  // namespace nscf
