#include "nscf/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nscf/error.hpp"
#include "nscf/union_find.hpp"

namespace nscf {

namespace {

std::vector<PhasePoint> numbered_points(const std::string& prefix, std::size_t m) {
  std::vector<PhasePoint> pts(m);
  for (std::size_t i = 0; i < m; ++i) pts[i].id = prefix + std::to_string(i);
  return pts;
}

std::size_t numeric_rank(const CMat& B, double rel = 1e-10) {
  if (B.size() == 0) return 0;
  CMat Bn = B;
  for (Eigen::Index j = 0; j < Bn.cols(); ++j) {
    const double n = Bn.col(j).norm();
    if (n == 0.0) return 0;
    Bn.col(j) /= n;
  }
  Eigen::JacobiSVD<CMat> svd(Bn);
  const auto& s = svd.singularValues();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > rel * s[0] ? 1 : 0;
  return r;
}

double diameter(const RMat& d) { return d.size() ? d.maxCoeff() : 0.0; }

}  // namespace

// ---- PhaseSpace ----

void PhaseSpace::check_ids() const {
  require(!points_.empty(), ErrorCode::InvalidArgument, "phase space must have a point");
  std::set<std::string> seen;
  for (const auto& p : points_)
    require(seen.insert(p.id).second, ErrorCode::InvalidArgument,
            "duplicate point id '" + p.id + "'");
}

PhaseSpace PhaseSpace::with_metric(std::vector<PhasePoint> points, RMat metric, double epsilon) {
  PhaseSpace s;
  s.points_ = std::move(points);
  s.check_ids();
  require(metric.rows() == static_cast<Eigen::Index>(s.points_.size()),
          ErrorCode::DimensionMismatch, "metric size does not match the number of points");
  validate_metric(metric);
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
  s.metric_ = std::move(metric);
  s.epsilon_ = epsilon;
  return s;
}

PhaseSpace PhaseSpace::with_adjacency(std::vector<PhasePoint> points, std::vector<Edge> edges) {
  PhaseSpace s;
  s.points_ = std::move(points);
  s.check_ids();
  for (auto& e : edges) {
    require(e.first < s.points_.size() && e.second < s.points_.size(),
            ErrorCode::UnknownPoint, "adjacency refers to a point out of range");
    require(e.first != e.second, ErrorCode::InvalidArgument, "adjacency has a self loop");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  s.adjacency_ = std::move(edges);
  return s;
}

PhaseSpace PhaseSpace::bare(std::vector<PhasePoint> points) {
  PhaseSpace s;
  s.points_ = std::move(points);
  s.check_ids();
  return s;
}

std::size_t PhaseSpace::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (points_[i].id == id) return i;
  fail(ErrorCode::UnknownPoint, "unknown point id '" + id + "'");
}

std::vector<std::string> PhaseSpace::ids() const {
  std::vector<std::string> out;
  for (const auto& p : points_) out.push_back(p.id);
  return out;
}

const RMat& PhaseSpace::metric() const {
  require(metric_.has_value(), ErrorCode::InvalidArgument, "phase space has no metric");
  return *metric_;
}

const std::vector<PhaseSpace::Edge>& PhaseSpace::adjacency() const {
  require(adjacency_.has_value(), ErrorCode::InvalidArgument, "phase space has no adjacency");
  return *adjacency_;
}

std::vector<PhaseSpace::Edge> PhaseSpace::proximity_edges() const {
  if (adjacency_) return *adjacency_;
  std::vector<Edge> out;
  if (metric_) {
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if ((*metric_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= epsilon_)
          out.emplace_back(i, j);
  }
  return out;
}

std::vector<std::vector<std::size_t>> PhaseSpace::proximity_components() const {
  UnionFind uf(size());
  for (const auto& [a, b] : proximity_edges()) uf.unite(a, b);
  return uf.classes();
}

// ---- FunctionSpaceModel ----

FunctionSpaceModel::FunctionSpaceModel(PhaseSpace phase, CMat basis, NormSpec coeff_norm,
                                       std::vector<std::string> flags)
    : phase_(std::move(phase)),
      basis_(std::move(basis)),
      norm_(std::move(coeff_norm)),
      flags_(std::move(flags)) {
  require(basis_.rows() == static_cast<Eigen::Index>(phase_.size()),
          ErrorCode::DimensionMismatch,
          "basis has " + std::to_string(basis_.rows()) + " rows for " +
              std::to_string(phase_.size()) + " points");
  require(basis_.cols() == static_cast<Eigen::Index>(norm_.dim()), ErrorCode::DimensionMismatch,
          "basis has " + std::to_string(basis_.cols()) + " columns but the norm has dimension " +
              std::to_string(norm_.dim()));
  require(basis_.allFinite(), ErrorCode::InvalidArgument, "basis entries must be finite");
  require(numeric_rank(basis_) == static_cast<std::size_t>(basis_.cols()),
          ErrorCode::NotIndependent, "basis functions are linearly dependent on the sample");
}

Functional point_evaluation(const FunctionSpaceModel& F, std::size_t index) {
  require(index < F.num_points(), ErrorCode::UnknownPoint,
          "point index " + std::to_string(index) + " out of range");
  return {F.basis().row(static_cast<Eigen::Index>(index)).transpose()};
}

Functional point_evaluation(const FunctionSpaceModel& F, const std::string& id) {
  return point_evaluation(F, F.phase().index_of(id));
}

OneIndependence is_1_independent(const FunctionSpaceModel& F, double tol) {
  OneIndependence r;
  for (Eigen::Index i = 0; i < F.basis().rows(); ++i)
    if (F.basis().row(i).cwiseAbs().maxCoeff() <= tol)
      r.violating.push_back(static_cast<std::size_t>(i));
  r.independent = r.violating.empty();
  return r;
}

TwoIndependence is_2_independent(const FunctionSpaceModel& F, double tol) {
  TwoIndependence r;
  const CMat& B = F.basis();
  for (Eigen::Index i = 0; i < B.rows(); ++i)
    for (Eigen::Index j = i + 1; j < B.rows(); ++j) {
      const double a = B.row(i).squaredNorm(), b = B.row(j).squaredNorm();
      const double ip = std::norm(B.row(i).dot(B.row(j)));
      // Gram determinant of the two rows relative to the product of norms.
      if (a == 0.0 || b == 0.0 || a * b - ip <= tol * tol * a * b) {
        r.independent = false;
        r.violating = std::make_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        return r;
      }
    }
  return r;
}

cplx omega_unit(cplx z) { return std::abs(z) == 0.0 ? cplx(1.0, 0.0) : z / std::abs(z); }

cplx kernel_basis_value(int n, cplx z) {
  return z * std::pow(omega_unit(z), n) * std::ldexp(1.0, -std::abs(n));
}

FunctionSpaceModel rkhs_from_kernel(const std::vector<cplx>& points, KernelChoice kernel,
                                    double epsilon) {
  require(kernel.N >= 1, ErrorCode::InvalidArgument, "kernel truncation N must be at least 1");
  require(!points.empty(), ErrorCode::InvalidArgument, "need at least one point");
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto k = static_cast<Eigen::Index>(kernel.size());
  std::vector<PhasePoint> pts = numbered_points("z", points.size());
  std::vector<std::string> flags;
  RMat d(m, m);
  CMat B(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    const cplx z = points[static_cast<std::size_t>(i)];
    require(std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z) <= 1.0 + 1e-12,
            ErrorCode::InvalidArgument, "kernel points must lie in the closed unit disk");
    if (std::abs(z) == 0.0)
      flags.push_back("omega(0) = 1 convention used at point " + pts[i].id);
    pts[static_cast<std::size_t>(i)].coord = z;
    for (Eigen::Index j = 0; j < m; ++j) d(i, j) = std::abs(z - points[static_cast<std::size_t>(j)]);
    for (Eigen::Index n = 0; n < k; ++n)
      B(i, n) = kernel_basis_value(kernel.lowest() + static_cast<int>(n), z);
  }
  return FunctionSpaceModel(PhaseSpace::with_metric(std::move(pts), std::move(d), epsilon),
                            std::move(B),
                            NormSpec::hilbert(CMat::Identity(k, k)), std::move(flags));
}

cplx kernel_partial_sum(cplx z, cplx w, KernelChoice kernel) {
  cplx s{0.0, 0.0};
  for (int n = kernel.lowest(); n <= kernel.N; ++n)
    s += kernel_basis_value(n, z) * std::conj(kernel_basis_value(n, w));
  return s;
}

cplx kernel_closed_form(cplx z, cplx w) {
  const cplx zw = z * std::conj(w);
  return 4.0 * zw / (4.0 * std::abs(z) * std::abs(w) - zw);
}

FunctionSpaceModel lipschitz_space(const RMat& metric, std::size_t basepoint, bool penalize,
                                   double epsilon) {
  NormSpec norm = NormSpec::lipschitz(metric, basepoint, penalize);
  const auto m = metric.rows();
  const auto k = static_cast<Eigen::Index>(norm.dim());
  CMat B = CMat::Zero(m, k);
  for (Eigen::Index i = 0, c = 0; i < m; ++i) {
    if (!penalize && static_cast<std::size_t>(i) == basepoint) continue;
    B(i, c++) = 1.0;
  }
  return FunctionSpaceModel(
      PhaseSpace::with_metric(numbered_points("p", static_cast<std::size_t>(m)), metric, epsilon),
      std::move(B), std::move(norm));
}

FunctionSpaceModel hilbert_kernel_model(PhaseSpace phase, const CMat& kernel) {
  require(kernel.rows() == static_cast<Eigen::Index>(phase.size()) &&
              kernel.cols() == kernel.rows(),
          ErrorCode::DimensionMismatch, "kernel matrix must be square over the phase points");
  return FunctionSpaceModel(std::move(phase), kernel, NormSpec::hilbert(kernel));
}

NormView dual_space_view(const FunctionSpaceModel& F, double tol) {
  return NormView::dual_of(F.coeff_norm(), tol);
}

PhaseSpace restrict_phase(const PhaseSpace& ph, const std::vector<std::size_t>& keep) {
  std::vector<PhasePoint> pts;
  std::vector<long> remap(ph.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] < ph.size(), ErrorCode::UnknownPoint, "restrict_phase: index out of range");
    require(remap[keep[i]] < 0, ErrorCode::InvalidArgument, "restrict_phase: repeated index");
    remap[keep[i]] = static_cast<long>(i);
    pts.push_back(ph.point(keep[i]));
  }
  if (ph.has_metric()) {
    const auto n = static_cast<Eigen::Index>(keep.size());
    RMat d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        d(i, j) = ph.metric()(static_cast<Eigen::Index>(keep[static_cast<std::size_t>(i)]),
                              static_cast<Eigen::Index>(keep[static_cast<std::size_t>(j)]));
    return PhaseSpace::with_metric(std::move(pts), std::move(d), ph.epsilon());
  }
  if (ph.has_adjacency()) {
    std::vector<PhaseSpace::Edge> edges;
    for (const auto& [a, b] : ph.adjacency())
      if (remap[a] >= 0 && remap[b] >= 0)
        edges.emplace_back(static_cast<std::size_t>(remap[a]), static_cast<std::size_t>(remap[b]));
    return PhaseSpace::with_adjacency(std::move(pts), std::move(edges));
  }
  return PhaseSpace::bare(std::move(pts));
}

FunctionSpaceModel restrict_points(const FunctionSpaceModel& F,
                                   const std::vector<std::size_t>& keep) {
  CMat B(static_cast<Eigen::Index>(keep.size()), F.basis().cols());
  PhaseSpace ph = restrict_phase(F.phase(), keep);
  for (std::size_t i = 0; i < keep.size(); ++i)
    B.row(static_cast<Eigen::Index>(i)) = F.basis().row(static_cast<Eigen::Index>(keep[i]));
  return FunctionSpaceModel(std::move(ph), std::move(B), F.coeff_norm(), F.flags());
}

FunctionSpaceModel disjoint_sum(const FunctionSpaceModel& F, const FunctionSpaceModel& E) {
  const PhaseSpace& a = F.phase();
  const PhaseSpace& b = E.phase();
  std::vector<PhasePoint> pts = a.points();
  pts.insert(pts.end(), b.points().begin(), b.points().end());
  const std::size_t m = a.size(), n = b.size();

  auto make_phase = [&]() {
    if (a.has_metric() && b.has_metric()) {
      // Cross distance beyond both neighbourhood scales keeps the triangle
      // inequality and separates the two pieces.
      const double eps = std::max(a.epsilon(), b.epsilon());
      const double gap = std::max(diameter(a.metric()), diameter(b.metric())) + 2.0 * eps;
      RMat d = RMat::Constant(static_cast<Eigen::Index>(m + n), static_cast<Eigen::Index>(m + n), gap);
      d.topLeftCorner(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = a.metric();
      d.bottomRightCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = b.metric();
      return PhaseSpace::with_metric(pts, d, eps);
    }
    std::vector<PhaseSpace::Edge> edges = a.proximity_edges();
    for (const auto& [x, y] : b.proximity_edges()) edges.emplace_back(x + m, y + m);
    return PhaseSpace::with_adjacency(pts, edges);
  };

  const auto kf = F.basis().cols(), ke = E.basis().cols();
  CMat B = CMat::Zero(static_cast<Eigen::Index>(m + n), kf + ke);
  B.topLeftCorner(static_cast<Eigen::Index>(m), kf) = F.basis();
  B.bottomRightCorner(static_cast<Eigen::Index>(n), ke) = E.basis();
  std::vector<std::string> flags = F.flags();
  flags.insert(flags.end(), E.flags().begin(), E.flags().end());
  return FunctionSpaceModel(make_phase(), std::move(B),
                            NormSpec::block_sum({F.coeff_norm(), E.coeff_norm()},
                                                RhoCombiner::outer_lp(2.0)),
                            std::move(flags));
}

}  // namespace nscf
