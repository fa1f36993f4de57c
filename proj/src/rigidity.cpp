#include "nscf/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nscf/error.hpp"

namespace nscf {

const char* to_string(Verdict::Kind k) {
  return k == Verdict::Kind::Scalar ? "scalar" : "non_scalar_witness";
}

namespace {

std::string fmt(cplx z) {
  std::ostringstream o;
  o.precision(6);
  o << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return o.str();
}

void check_square(const FunctionSpaceModel& F, const CMat& T, const char* what) {
  const auto k = static_cast<Eigen::Index>(F.dim());
  require(T.rows() == k && T.cols() == k, ErrorCode::DimensionMismatch,
          std::string(what) + ": operator must be " + std::to_string(k) + "x" +
              std::to_string(k));
}

// Orthonormal basis of range(A), rank relative to `scale`.
CMat orth(const CMat& A, double scale) {
  if (A.cols() == 0) return CMat(A.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s[r] > 1e-10 * scale) ++r;
  return svd.matrixU().leftCols(r);
}

bool unimodular_generalized_permutation(const CMat& T, double tol) {
  const Eigen::Index k = T.rows();
  std::vector<int> row_hits(static_cast<std::size_t>(k), 0);
  for (Eigen::Index j = 0; j < k; ++j) {
    int hits = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double a = std::abs(T(i, j));
      if (a <= 1e-14) continue;
      if (std::abs(a - 1.0) > tol) return false;
      ++hits;
      ++row_hits[static_cast<std::size_t>(i)];
    }
    if (hits != 1) return false;
  }
  return std::all_of(row_hits.begin(), row_hits.end(), [](int h) { return h == 1; });
}

IsometryMode default_mode(const NormSpec& norm) {
  return hilbert_gram_equivalent(norm) ? IsometryMode::exact_hilbert() : IsometryMode::sampled(500);
}

double max_abs(const std::vector<cplx>& w) {
  double m = 0.0;
  for (const auto& z : w) m = std::max(m, std::abs(z));
  return m;
}

// Shared tail of the verdict pipelines: unitarity, graph, propagation.
RigidityReport verdict_for(const FunctionSpaceModel& F, const CMat& T,
                           const std::vector<cplx>& omega, double tol) {
  RigidityReport rep;
  rep.isometry = is_isometry(F, T, default_mode(F.coeff_norm()));
  if (!rep.isometry.isometric)
    fail(ErrorCode::NotIsometric, "multiplication operator is not isometric (" +
                                      rep.isometry.method + " deviation " +
                                      std::to_string(rep.isometry.max_deviation) + ")");
  if (!rep.isometry.invertible)
    fail(ErrorCode::NotIsometric, "multiplication operator is not invertible (condition " +
                                      std::to_string(rep.isometry.condition) + ")");
  const BirkhoffGraph g = build_graph(F, tol);
  const Propagation prop = propagate_eigenvalues(g, omega, tol, true);
  rep.points = g.vertices;
  rep.omega = omega;
  rep.components = prop.components;
  rep.verdict = prop.verdict;
  rep.edges = g.edges.size();
  rep.soft_edges = g.soft_edge_count();
  for (const auto& c : prop.components)
    for (std::size_t v : c.members)
      rep.max_weight_deviation = std::max(rep.max_weight_deviation, std::abs(omega[v] - c.lambda));
  return rep;
}

}  // namespace

MoDetection detect_mo(const FunctionSpaceModel& F, const OperatorMatrix& T, double tol) {
  check_square(F, T, "detect_mo");
  const NormView view = dual_space_view(F);
  MoDetection r;
  r.omega.assign(F.num_points(), cplx(0.0, 0.0));
  r.is_mo = true;
  for (std::size_t x = 0; x < F.num_points(); ++x) {
    const CVec b = point_evaluation(F, x).coeffs;
    Eigen::Index piv = 0;
    const double mx = b.cwiseAbs().maxCoeff(&piv);
    if (mx <= 1e-12) {
      r.null_points.push_back(x);
      continue;
    }
    const CVec tb = T.transpose() * b;  // coefficients of T'x_F
    const cplx w = tb[piv] / b[piv];
    const double nb = view.norm(b);
    const double res = view.norm(tb - w * b) / nb;
    r.max_residual = std::max(r.max_residual, res);
    r.omega[x] = w;
    if (res > tol && r.is_mo) {
      r.is_mo = false;
      r.failing_point = x;
    }
  }
  if (!r.is_mo) r.omega.clear();
  return r;
}

MoFromWeight mo_from_weight(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                            double tol) {
  require(omega.size() == F.num_points(), ErrorCode::DimensionMismatch,
          "mo_from_weight: one weight per point required");
  // Columns are equilibrated first; kernel bases decay geometrically.
  const RVec c = F.basis().colwise().norm().transpose();
  const CMat B = F.basis() * c.cwiseInverse().asDiagonal();
  CVec w(static_cast<Eigen::Index>(omega.size()));
  for (std::size_t i = 0; i < omega.size(); ++i) w[static_cast<Eigen::Index>(i)] = omega[i];
  const CMat WB = w.asDiagonal() * B;
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(B);
  const CMat Tn = cod.solve(WB);
  const CMat T = c.cwiseInverse().asDiagonal() * Tn * c.asDiagonal();
  MoFromWeight r;
  const double scale = B.norm() * std::max(1.0, w.cwiseAbs().maxCoeff());
  r.residual = (WB - B * Tn).norm() / scale;
  if (r.residual <= tol) r.T = T;
  return r;
}

IsometryEvidence is_isometry(const NormSpec& norm, const OperatorMatrix& T, IsometryMode mode,
                             double tol) {
  const auto k = static_cast<Eigen::Index>(norm.dim());
  require(T.rows() == k && T.cols() == k, ErrorCode::DimensionMismatch,
          "is_isometry: operator dimension does not match the norm");
  IsometryEvidence ev;
  Eigen::JacobiSVD<CMat> svd(T);
  const auto& s = svd.singularValues();
  ev.condition = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1]
                                       : std::numeric_limits<double>::infinity();
  ev.invertible = ev.condition <= 1e8;

  if (mode.kind == IsometryMode::Kind::ExactHilbert) {
    const auto G = hilbert_gram_equivalent(norm);
    if (!G)
      fail(ErrorCode::Unsupported, std::string("exact_hilbert isometry check needs a Hilbertian "
                                               "norm, got ") + to_string(norm.kind()));
    ev.method = "exact_hilbert";
    ev.exact = true;
    ev.max_deviation = (T.adjoint() * *G * T - *G).cwiseAbs().maxCoeff() / G->cwiseAbs().maxCoeff();
    ev.isometric = ev.max_deviation <= tol;
    return ev;
  }
  std::mt19937_64 rng(mode.seed);
  std::normal_distribution<double> g;
  ev.method = "sampled";
  ev.samples = mode.samples;
  for (int n = 0; n < mode.samples; ++n) {
    CVec v(k);
    for (Eigen::Index i = 0; i < k; ++i)
      v[i] = norm.real_scalars() ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
    const double nv = norm_eval(norm, v);
    if (nv == 0.0) continue;
    ev.max_deviation = std::max(ev.max_deviation, std::abs(norm_eval(norm, T * v) / nv - 1.0));
  }
  ev.isometric = ev.max_deviation <= tol;
  if (norm.kind() == NormSpec::Kind::Lp && unimodular_generalized_permutation(T, 1e-12)) {
    ev.method = "structural";
    ev.exact = true;
    ev.isometric = true;
  }
  return ev;
}

IsometryEvidence is_isometry(const FunctionSpaceModel& F, const OperatorMatrix& T,
                             IsometryMode mode, double tol) {
  check_square(F, T, "is_isometry");
  return is_isometry(F.coeff_norm(), T, mode, tol);
}

Propagation propagate_eigenvalues(const BirkhoffGraph& g, const std::vector<cplx>& omega,
                                  double tol, bool unimodular) {
  require(omega.size() == g.size(), ErrorCode::DimensionMismatch,
          "propagate_eigenvalues: one weight per vertex required");
  const double thr = tol * std::max(max_abs(omega), 1e-300);
  Propagation out;
  for (const auto& comp : g.components) {
    ComponentLambda cl;
    cl.members = comp;
    cplx sum{0.0, 0.0};
    for (std::size_t a : comp) {
      sum += omega[a];
      for (std::size_t b : comp) cl.spread = std::max(cl.spread, std::abs(omega[a] - omega[b]));
    }
    if (cl.spread > thr) {
      // Name the worst edge inside the component.
      const PairRecord* worst = nullptr;
      double wd = -1.0;
      for (const auto& p : g.pairs) {
        if (!p.edge || std::find(comp.begin(), comp.end(), p.a) == comp.end()) continue;
        const double d = std::abs(omega[p.a] - omega[p.b]);
        if (d > wd) {
          wd = d;
          worst = &p;
        }
      }
      std::ostringstream msg;
      msg << "eigenvalues disagree inside a component";
      if (worst)
        msg << ": edge {" << g.vertices[worst->a] << ", " << g.vertices[worst->b]
            << "} joins omega " << fmt(omega[worst->a]) << " and " << fmt(omega[worst->b])
            << " (margins " << worst->margin_ab << ", " << worst->margin_ba << ", "
            << (worst->soft ? "soft" : "hard") << " edge)";
      fail(ErrorCode::InconsistentComponent, msg.str());
    }
    cl.lambda = sum / static_cast<double>(comp.size());
    if (unimodular && std::abs(cl.lambda) > 0.0) cl.lambda /= std::abs(cl.lambda);
    out.components.push_back(std::move(cl));
  }
  out.verdict.kind = Verdict::Kind::Scalar;
  if (!out.components.empty()) out.verdict.lambda = out.components[0].lambda;
  for (std::size_t c = 1; c < out.components.size(); ++c) {
    if (std::abs(out.components[c].lambda - out.components[0].lambda) > thr) {
      out.verdict.kind = Verdict::Kind::NonScalarWitness;
      out.verdict.lambda = {0.0, 0.0};
      out.verdict.component_a = 0;
      out.verdict.component_b = c;
      out.verdict.lambda_a = out.components[0].lambda;
      out.verdict.lambda_b = out.components[c].lambda;
      break;
    }
  }
  return out;
}

RigidityReport rigidity_verdict(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                                double tol) {
  const MoFromWeight mo = mo_from_weight(F, omega);
  if (!mo.T)
    fail(ErrorCode::NotMultiplier, "weight is not a multiplier (least-squares residual " +
                                       std::to_string(mo.residual) + ")");
  return verdict_for(F, *mo.T, omega, tol);
}

RigidityReport rigidity_verdict_operator(const FunctionSpaceModel& F, const OperatorMatrix& T,
                                         double tol) {
  const MoDetection d = detect_mo(F, T);
  if (!d.is_mo)
    fail(ErrorCode::NotMultiplier, "operator is not a multiplication operator at point '" +
                                       F.phase().point(*d.failing_point).id + "'");
  return verdict_for(F, T, d.omega, tol);
}

std::optional<CMat> weighted_composition(const FunctionSpaceModel& F, const FunctionSpaceModel& E,
                                         const std::vector<std::size_t>& phi,
                                         const std::vector<cplx>& omega, double tol) {
  require(phi.size() == E.num_points() && omega.size() == E.num_points(),
          ErrorCode::DimensionMismatch, "weighted_composition: Phi and omega live on E-points");
  const CMat& BE = E.basis();
  CMat rhs(BE.rows(), F.basis().cols());
  for (std::size_t y = 0; y < phi.size(); ++y) {
    require(phi[y] < F.num_points(), ErrorCode::UnknownPoint, "Phi maps outside F");
    rhs.row(static_cast<Eigen::Index>(y)) =
        omega[y] * F.basis().row(static_cast<Eigen::Index>(phi[y]));
  }
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(BE);
  const CMat W = cod.solve(rhs);
  const double scale = std::max(1e-300, rhs.norm());
  if ((BE * W - rhs).norm() > tol * std::max(scale, BE.norm())) return std::nullopt;
  return W;
}

WcoResult wco_compare(const FunctionSpaceModel& F, const FunctionSpaceModel& E,
                      const std::vector<std::size_t>& phi, const std::vector<cplx>& omega,
                      const std::vector<cplx>& upsilon, const OperatorMatrix& S, double tol) {
  require(upsilon.size() == E.num_points() && omega.size() == E.num_points(),
          ErrorCode::DimensionMismatch, "wco_compare: omega and upsilon live on E-points");
  check_square(F, S, "wco_compare");
  for (const auto* w : {&upsilon, &omega}) {
    const double wmax = max_abs(*w);
    for (std::size_t y = 0; y < w->size(); ++y)
      require(std::abs((*w)[y]) > 1e-12 * std::max(1.0, wmax), ErrorCode::ZeroVector,
              std::string("wco_compare: ") + (w == &upsilon ? "upsilon" : "omega") +
                  " vanishes at '" + E.phase().point(y).id + "'");
  }
  const auto Ww = weighted_composition(F, E, phi, omega);
  const auto Wu = weighted_composition(F, E, phi, upsilon);
  if (!Ww || !Wu) fail(ErrorCode::NotMultiplier, "wco_compare: W does not map F into E");
  const double dev = (*Ww - *Wu * S).norm() / std::max(1.0, Ww->norm());
  if (dev > tol)
    fail(ErrorCode::IdentityViolated,
         "W_{Phi,omega} differs from W_{Phi,upsilon} S by " + std::to_string(dev));

  WcoResult r;
  std::vector<long> slot(F.num_points(), -1);
  for (std::size_t y = 0; y < phi.size(); ++y) {
    const cplx q = upsilon[y] / omega[y];
    if (slot[phi[y]] < 0) {
      slot[phi[y]] = static_cast<long>(r.image.size());
      r.image.push_back(phi[y]);
      r.ratio.push_back(q);
    } else if (std::abs(r.ratio[static_cast<std::size_t>(slot[phi[y]])] - q) > tol * std::abs(q)) {
      fail(ErrorCode::InconsistentComponent,
           "ratios differ over the fibre of '" + F.phase().point(phi[y]).id + "'");
    }
  }
  std::vector<std::string> ids;
  std::vector<CVec> ev;
  for (std::size_t x : r.image) {
    ids.push_back(F.phase().point(x).id);
    ev.push_back(point_evaluation(F, x).coeffs);
  }
  const BirkhoffGraph g = build_graph(dual_space_view(F), ids, ev, tol);
  const Propagation prop = propagate_eigenvalues(g, r.ratio, tol, false);
  r.isometry = is_isometry(F, S, default_mode(F.coeff_norm()));
  if (!r.isometry.isometric) fail(ErrorCode::NotIsometric, "wco_compare: S is not isometric");
  r.components = prop.components;
  for (auto& c : r.components) c.lambda /= std::abs(c.lambda);
  r.connected = g.connected();
  if (prop.verdict.scalar() && !r.components.empty()) r.lambda = r.components[0].lambda;
  return r;
}

CoreResult invariant_core(const OperatorMatrix& M, std::size_t n_max) {
  require(M.rows() == M.cols() && M.rows() >= 1, ErrorCode::DimensionMismatch,
          "invariant_core: operator must be square");
  const auto k = static_cast<std::size_t>(M.rows());
  if (n_max == 0) n_max = k;
  const double scale = std::max(1e-300, M.operatorNorm());
  CoreResult r;
  r.ranges.push_back(CMat::Identity(M.rows(), M.rows()));
  r.dims.push_back(k);
  r.ranges.push_back(orth(M, scale));
  r.dims.push_back(static_cast<std::size_t>(r.ranges.back().cols()));
  for (std::size_t n = 1; n <= n_max; ++n) {
    CMat next = orth(M * r.ranges[n], scale);
    const auto d = static_cast<std::size_t>(next.cols());
    if (d == r.dims[n]) {
      r.n_star = n;
      r.stabilized = true;
      break;
    }
    if (n == n_max) break;
    r.ranges.push_back(std::move(next));
    r.dims.push_back(d);
  }
  if (!r.stabilized) r.n_star = r.dims.size() - 1;
  r.basis = r.ranges[r.n_star];
  return r;
}

CoreResult invariant_core(const FunctionSpaceModel& F, const OperatorMatrix& M, std::size_t n_max) {
  check_square(F, M, "invariant_core");
  return invariant_core(M, n_max);
}

FunctionSpaceModel restrict_to_subspace(const FunctionSpaceModel& F, const CMat& V) {
  require(V.rows() == static_cast<Eigen::Index>(F.dim()) && V.cols() >= 1,
          ErrorCode::DimensionMismatch, "restrict_to_subspace: bad subspace basis");
  if (V.cols() == V.rows()) return F;
  const auto G = hilbert_gram_equivalent(F.coeff_norm());
  if (!G)
    fail(ErrorCode::Unsupported,
         "restriction to a proper subspace needs a Hilbertian coefficient norm");
  const CMat BV = F.basis() * V;
  const double scale = std::max(1e-300, BV.cwiseAbs().maxCoeff());
  std::vector<std::size_t> keep;
  for (Eigen::Index i = 0; i < BV.rows(); ++i)
    if (BV.row(i).cwiseAbs().maxCoeff() > 1e-12 * scale) keep.push_back(static_cast<std::size_t>(i));
  CMat B(static_cast<Eigen::Index>(keep.size()), V.cols());
  for (std::size_t i = 0; i < keep.size(); ++i)
    B.row(static_cast<Eigen::Index>(i)) = BV.row(static_cast<Eigen::Index>(keep[i]));
  CMat Gs = V.adjoint() * *G * V;
  Gs = 0.5 * (Gs + Gs.adjoint()).eval();
  return FunctionSpaceModel(restrict_phase(F.phase(), keep), std::move(B), NormSpec::hilbert(Gs),
                            F.flags());
}

namespace {

RigidityReport core_rigidity(const FunctionSpaceModel& F, const CMat& T, double tol,
                             std::size_t n_max) {
  const CoreResult core = invariant_core(F, T, n_max);
  if (core.basis.cols() == 0)
    fail(ErrorCode::VacuousCore,
         "invariant core is {0}: no rigidity content at this truncation (stabilized after " +
             std::to_string(core.n_star) + " steps)");
  const CMat& V = core.basis;
  const FunctionSpaceModel Fc = restrict_to_subspace(F, V);
  const CMat Tc = V.cols() == V.rows() ? T : CMat(V.adjoint() * T * V);
  const MoDetection d = detect_mo(Fc, Tc);
  if (!d.is_mo)
    fail(ErrorCode::NotMultiplier, "operator restricted to its core is not a multiplication operator");
  RigidityReport rep = verdict_for(Fc, Tc, d.omega, tol);
  rep.core_dim = static_cast<std::size_t>(V.cols());
  rep.n_star = core.n_star;
  return rep;
}

}  // namespace

RigidityReport isometry_rigidity(const FunctionSpaceModel& F, const std::vector<cplx>& omega,
                                 double tol, std::size_t n_max) {
  const MoFromWeight mo = mo_from_weight(F, omega);
  if (!mo.T)
    fail(ErrorCode::NotMultiplier, "weight is not a multiplier (least-squares residual " +
                                       std::to_string(mo.residual) + ")");
  return core_rigidity(F, *mo.T, tol, n_max);
}

RigidityReport isometry_rigidity_operator(const FunctionSpaceModel& F, const OperatorMatrix& T,
                                          double tol, std::size_t n_max) {
  return core_rigidity(F, T, tol, n_max);
}

}  // namespace nscf
