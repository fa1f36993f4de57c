#include "nscf/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "nscf/error.hpp"
#include "nscf/json_io.hpp"
#include "nscf/rigidity.hpp"

namespace nscf {

namespace {

constexpr double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng); }
  cplx cnormal() { return {normal(), normal()}; }
  cplx unimodular() { return std::polar(1.0, uniform(0.0, 2.0 * kPi)); }
  CVec cvec(Eigen::Index n) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cnormal();
    return v;
  }
  CMat cmat(Eigen::Index r, Eigen::Index c) {
    CMat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = cnormal();
    return m;
  }
  CMat unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMat> qr(cmat(n, n));
    return qr.householderQ() * CMat::Identity(n, n);
  }
};

std::vector<PhasePoint> numbered(const std::string& prefix, std::size_t m) {
  std::vector<PhasePoint> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back({prefix + std::to_string(i), std::nullopt});
  return out;
}

RMat line_metric(const std::vector<double>& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  RMat d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
  return d;
}

// Gaussian kernel on jittered points of a line with random phases
// K(x, y) = exp(-(x - y)^2 / b) e^{i(a_x - a_y)}; no entry vanishes.
FunctionSpaceModel gaussian_kernel_model(Rng& rng, const std::string& prefix, int m,
                                         double spacing, double bandwidth) {
  std::vector<double> x(static_cast<std::size_t>(m));
  std::vector<double> a(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    x[static_cast<std::size_t>(i)] = spacing * i + rng.uniform(0.0, 0.1 * spacing);
    a[static_cast<std::size_t>(i)] = rng.uniform(0.0, 2.0 * kPi);
  }
  CMat K(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double d = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      K(i, j) = std::exp(-d * d / bandwidth) *
                std::polar(1.0, a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]);
    }
  K = 0.5 * (K + K.adjoint()).eval();
  return hilbert_kernel_model(
      PhaseSpace::with_metric(numbered(prefix, static_cast<std::size_t>(m)), line_metric(x),
                              1.5 * spacing),
      K);
}

bool nonconstant(const std::vector<cplx>& w, double tol) {
  double scale = 0.0;
  for (const auto& z : w) scale = std::max(scale, std::abs(z));
  for (const auto& z : w)
    if (std::abs(z - w.front()) > tol * std::max(1.0, scale)) return true;
  return false;
}

// A Scalar verdict for a nonconstant weight that passed an exact unitarity
// certificate on a connected graph would contradict rigidity.
bool false_scalar(const RigidityReport& r, double tol) {
  return r.verdict.scalar() && r.isometry.exact && r.isometry.unitary() &&
         r.components.size() <= 1 && nonconstant(r.omega, 10.0 * tol);
}

// Edges carrying distinct weights under an exact isometry must be soft.
std::size_t hard_edge_violations(const BirkhoffGraph& g, const std::vector<cplx>& w,
                                 const IsometryEvidence& iso, double tol) {
  if (!(iso.exact && iso.unitary())) return 0;
  double scale = 0.0;
  for (const auto& z : w) scale = std::max(scale, std::abs(z));
  std::size_t bad = 0;
  for (const auto& p : g.pairs)
    if (p.edge && !p.soft && std::abs(w[p.a] - w[p.b]) > tol * std::max(1.0, scale)) ++bad;
  return bad;
}

IsometryMode default_mode(const FunctionSpaceModel& F) {
  return hilbert_gram_equivalent(F.coeff_norm()) ? IsometryMode::exact_hilbert()
                                                 : IsometryMode::sampled(500);
}

// Rigidity pipeline outcome; rejections are data here.
struct Outcome {
  std::optional<RigidityReport> report;
  std::optional<ErrorCode> rejected;
};

Outcome try_verdict(const FunctionSpaceModel& F, const std::vector<cplx>& w) {
  Outcome o;
  try {
    o.report = rigidity_verdict(F, w);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotMultiplier && e.code() != ErrorCode::NotIsometric &&
        e.code() != ErrorCode::InconsistentComponent)
      throw;
    o.rejected = e.code();
  }
  return o;
}

double max_abs_diff(const CMat& a, const CMat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Least-squares coefficient matrix S with B_out S = diag(w) B_in.
CMat multiplication_matrix(const CMat& B_out, const CMat& B_in, const std::vector<cplx>& w) {
  const RVec co = B_out.colwise().norm().transpose();
  const RVec ci = B_in.colwise().norm().transpose();
  CMat rhs = B_in * ci.cwiseInverse().asDiagonal();
  for (Eigen::Index i = 0; i < rhs.rows(); ++i) rhs.row(i) *= w[static_cast<std::size_t>(i)];
  const CMat Bo = B_out * co.cwiseInverse().asDiagonal();
  return co.cwiseInverse().asDiagonal() * Bo.completeOrthogonalDecomposition().solve(rhs) *
         ci.asDiagonal();
}

}  // namespace

const char* to_string(Claim::Relation r) {
  switch (r) {
    case Claim::Relation::Equal: return "equal";
    case Claim::Relation::AtMost: return "at_most";
    case Claim::Relation::AtLeast: return "at_least";
    case Claim::Relation::Boolean: return "boolean";
    case Claim::Relation::Record: return "record";
  }
  return "unknown";
}

Claim claim_equal(std::string d, double expected, double observed, double tol) {
  return {std::move(d), Claim::Relation::Equal, expected, observed, tol,
          std::abs(expected - observed) <= tol};
}

Claim claim_at_most(std::string d, double bound, double observed, double tol) {
  return {std::move(d), Claim::Relation::AtMost, bound, observed, tol, observed <= bound + tol};
}

Claim claim_at_least(std::string d, double bound, double observed, double tol) {
  return {std::move(d), Claim::Relation::AtLeast, bound, observed, tol, observed >= bound - tol};
}

Claim claim_bool(std::string d, bool expected, bool observed) {
  return {std::move(d), Claim::Relation::Boolean, expected ? 1.0 : 0.0, observed ? 1.0 : 0.0,
          0.0, expected == observed};
}

Claim claim_record(std::string d, double observed) {
  return {std::move(d), Claim::Relation::Record, 0.0, observed, 0.0, true};
}

bool CorpusReport::passed() const { return failures() == 0; }

std::size_t CorpusReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(claims.begin(), claims.end(), [](const Claim& c) { return !c.pass; }));
}

CorpusReport run_lipschitz_mo(int n_points, std::uint64_t seed) {
  require(n_points >= 3, ErrorCode::InvalidArgument, "run_lipschitz_mo needs n_points >= 3");
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "lipschitz_mo";

  // Origin plus concentric rings r = j / R, angles offset by golden-ratio steps.
  const int rest = n_points - 1;
  const int rings = std::max(1, static_cast<int>(std::floor(std::sqrt(rest / 4.0))));
  std::vector<cplx> z = {cplx(0.0, 0.0)};
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double spin = rng.uniform(0.0, 1.0);
  for (int j = 1; j <= rings; ++j) {
    const int count = rest / rings + (j > rings - rest % rings ? 1 : 0);
    const double offset = std::fmod(spin + j * phi, 1.0);
    for (int k = 0; k < count; ++k)
      z.push_back(std::polar(static_cast<double>(j) / rings, 2.0 * kPi * (k + offset) / count));
  }
  const auto m = static_cast<Eigen::Index>(z.size());
  RMat d(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index k = 0; k < m; ++k)
      d(i, k) = std::abs(z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(k)]);

  std::vector<cplx> w(z.size()), wbar(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    w[i] = omega_unit(z[i]);
    wbar[i] = std::conj(w[i]);
  }
  auto ratio = [&](const std::vector<cplx>& weight, const CVec& f) {
    CVec g(m);
    for (Eigen::Index i = 0; i < m; ++i) g[i] = weight[static_cast<std::size_t>(i)] * f[i];
    return dil(d, g) / dil(d, f);
  };

  // Random functions vanishing at 0: independent values, perturbed real-linear
  // maps a z + b conj(z), and angular modes |z| w^k.
  double max_fwd = 0.0, max_inv = 0.0;
  for (int s = 0; s < 200; ++s) {
    CVec f(m);
    const int kind = s % 3;
    const cplx a = rng.cnormal(), b = rng.cnormal();
    const int mode = rng.integer(-3, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
      const cplx x = z[static_cast<std::size_t>(i)];
      if (kind == 0) f[i] = rng.cnormal();
      if (kind == 1) f[i] = a * x + b * std::conj(x) + 0.05 * rng.cnormal() * std::abs(x);
      if (kind == 2) f[i] = a * std::abs(x) * std::pow(omega_unit(x), mode);
    }
    f[0] = 0.0;
    max_fwd = std::max(max_fwd, ratio(w, f));
    max_inv = std::max(max_inv, ratio(wbar, f));
  }
  rep.claims.push_back(claim_at_most("max dil(w f) / dil(f) over 200 random f", 2.0, max_fwd, 1e-9));
  rep.claims.push_back(claim_at_least("the factor 2 bound is nearly attained", 1.5, max_fwd, 0.0));

  CVec fz(m), fabs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    fz[i] = z[static_cast<std::size_t>(i)];
    fabs[i] = std::abs(z[static_cast<std::size_t>(i)]);
  }
  rep.claims.push_back(claim_at_most("f(z) = z: dil(w f) / dil(f)", 2.0, ratio(w, fz), 1e-9));
  rep.claims.push_back(claim_equal("f(z) = |z|: w f = z, ratio 1", 1.0, ratio(w, fabs), 1e-12));

  const auto F = lipschitz_space(d, 0, false);
  const auto mo = mo_from_weight(F, w);
  rep.claims.push_back(claim_bool("w is a multiplier on the delta basis", true, mo.T.has_value()));
  rep.claims.push_back(claim_at_most("multiplier residual", 0.0, mo.residual, 1e-12));
  const auto inv = mo_from_weight(F, wbar);
  if (mo.T && inv.T) {
    const auto k = mo.T->rows();
    rep.claims.push_back(claim_at_most("M_w M_conj(w) = I", 0.0,
                                       max_abs_diff(*mo.T * *inv.T, CMat::Identity(k, k)), 1e-12));
    Eigen::FullPivLU<CMat> lu(*mo.T);
    rep.claims.push_back(claim_bool("M_w invertible", true, lu.isInvertible()));
  }
  rep.claims.push_back(
      claim_at_most("sampled norm of the inverse, dil(conj(w) f) / dil(f)", 2.0, max_inv, 1e-9));
  json::Json pts = json::Json::array();
  for (const auto& x : z) pts.push_back(json::to_json(x));
  rep.artifacts.emplace_back("points", json::dump(pts));
  return rep;
}

CorpusReport run_rkhs_shift(int N, int sample_points) {
  require(N >= 2, ErrorCode::InvalidArgument, "run_rkhs_shift needs N >= 2");
  require(sample_points >= N + 2, ErrorCode::InvalidArgument,
          "run_rkhs_shift needs at least N + 2 sample points");
  CorpusReport rep;
  rep.scenario = "rkhs_shift";
  std::vector<cplx> pts;
  for (int j = 0; j < sample_points; ++j) pts.push_back(std::polar(1.0, 2.0 * kPi * j / sample_points));
  const auto F = rkhs_from_kernel(pts, KernelChoice::unilateral(N));
  const CMat& B = F.basis();
  std::vector<cplx> w;
  for (const auto& z : pts) w.push_back(omega_unit(z));
  // Sampled recovery of coefficients has condition about 2^N, so the
  // relation is checked in unit-column coordinates and pointwise, and the
  // norm claims use the operator it determines.
  const RVec c = B.colwise().norm().transpose();
  const CMat Bn = B * c.cwiseInverse().asDiagonal();
  CMat rhs = Bn.leftCols(N);
  for (Eigen::Index i = 0; i < rhs.rows(); ++i) rhs.row(i) *= w[static_cast<std::size_t>(i)];
  const CMat X = Bn.completeOrthogonalDecomposition().solve(rhs);
  CMat shift = CMat::Zero(N + 1, N);
  CMat unit_shift = CMat::Zero(N + 1, N);
  for (int n = 0; n < N; ++n) {
    shift(n + 1, n) = 1.0;
    unit_shift(n + 1, n) = 2.0 * c[n + 1] / c[n];
  }
  rep.claims.push_back(claim_at_most("(1/2) M_w e_n = e_{n+1} for n < N (unit-column coordinates)",
                                     0.0, max_abs_diff(X, unit_shift), 1e-12));
  double pointwise = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int n = 0; n < N; ++n) {
      const cplx next = kernel_basis_value(n + 1, pts[i]);
      pointwise = std::max(pointwise,
                           std::abs(0.5 * w[i] * kernel_basis_value(n, pts[i]) - next) / std::abs(next));
    }
  rep.claims.push_back(claim_at_most("pointwise relative |(1/2) w e_n - e_{n+1}|", 0.0, pointwise, 1e-13));
  const CMat S = 2.0 * shift;
  const CMat half = 0.5 * S;
  rep.claims.push_back(claim_equal("(1/2) M_w preserves the Gram matrix", 0.0,
                                   max_abs_diff(half.adjoint() * half, CMat::Identity(N, N)), 0.0));
  Eigen::JacobiSVD<CMat> svd(S);
  rep.claims.push_back(claim_equal("||M_w|| on the truncation", 2.0, svd.singularValues()[0], 1e-15));
  rep.claims.push_back(claim_equal("||M_w e_0|| / ||e_0||", 2.0, S.col(0).norm(), 0.0));

  const auto full = KernelChoice::unilateral(N);
  const double tol = 4.0 * std::ldexp(1.0, -2 * N) + 1e-12;
  double worst = 0.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int s = 0; s < 20; ++s) {
    const cplx a = s == 0 ? cplx(1.0) : std::polar(1.0, 2.0 * kPi * std::fmod(s * phi, 1.0));
    const cplx b = s == 0 ? cplx(1.0) : std::polar(1.0, 2.0 * kPi * std::fmod(s * phi * phi, 1.0));
    const cplx closed = kernel_closed_form(a, b);
    worst = std::max(worst, std::abs(kernel_partial_sum(a, b, full) - closed) / std::abs(closed));
  }
  rep.claims.push_back(
      claim_at_most("kernel partial sums vs closed form, 20 unit pairs (relative)", 0.0, worst, tol));
  rep.claims.push_back(claim_equal("K_N(1, 1)", 4.0 / 3.0,
                                   kernel_partial_sum(1.0, 1.0, full).real(), tol));
  return rep;
}

CorpusReport run_rkhs_bilateral(int N) {
  require(N >= 1, ErrorCode::InvalidArgument, "run_rkhs_bilateral needs N >= 1");
  CorpusReport rep;
  rep.scenario = "rkhs_bilateral";
  const int m = 4 * N + 4;
  std::vector<cplx> pts;
  for (int j = 0; j < m; ++j) pts.push_back(std::polar(1.0, 2.0 * kPi * j / m));
  const auto F = rkhs_from_kernel(pts, KernelChoice::bilateral(N));
  const CMat& B = F.basis();
  std::vector<cplx> w;
  for (const auto& z : pts) w.push_back(omega_unit(z));
  // Domain e_-N..e_{N-1} are the first 2N columns.
  const CMat S = multiplication_matrix(B, B.leftCols(2 * N), w);
  CMat expected = CMat::Zero(2 * N + 1, 2 * N);
  for (int c = 0; c < 2 * N; ++c) {
    const int n = c - N;
    expected(c + 1, c) = std::ldexp(1.0, std::abs(n + 1) - std::abs(n));
  }
  rep.claims.push_back(claim_at_most("M_w e_n = 2^(|n+1| - |n|) e_{n+1}", 0.0,
                                     max_abs_diff(S, expected), 1e-12));
  std::vector<double> ratios;
  for (int c = 0; c < 2 * N; ++c) ratios.push_back(S.col(c).norm());
  rep.claims.push_back(claim_equal("n = 0: ||M_w e_0|| / ||e_0||", 2.0, ratios[static_cast<std::size_t>(N)], 1e-12));
  rep.claims.push_back(
      claim_equal("n = -1: ||M_w e_-1|| / ||e_-1||", 0.5, ratios[static_cast<std::size_t>(N - 1)], 1e-12));
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  rep.claims.push_back(claim_bool("ratios contain 2 and 1/2 (not a multiple of an isometry)", true,
                                  std::abs(*hi - 2.0) <= 1e-12 && std::abs(*lo - 0.5) <= 1e-12));
  Eigen::JacobiSVD<CMat> svd(S);
  const double smin = svd.singularValues()[svd.singularValues().size() - 1];
  rep.claims.push_back(claim_equal("smallest singular value of M_w", 0.5, smin, 1e-12));
  rep.claims.push_back(claim_bool("M_w injective on its domain", true, smin > 1e-8));
  return rep;
}

CorpusReport run_disjoint_sum(std::uint64_t seed) {
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "disjoint_sum";
  const auto F = gaussian_kernel_model(rng, "x", 3, 0.3, 0.5);
  const auto E = gaussian_kernel_model(rng, "y", 3, 0.3, 0.5);
  const auto gF = build_graph(F);
  const auto gE = build_graph(E);
  rep.claims.push_back(claim_bool("Birkhoff graph of F connected", true, gF.connected()));
  rep.claims.push_back(claim_bool("Birkhoff graph of E connected", true, gE.connected()));

  const auto H = disjoint_sum(F, E);
  std::vector<cplx> w(H.num_points(), 1.0);
  for (std::size_t i = F.num_points(); i < w.size(); ++i) w[i] = -1.0;
  const auto mo = mo_from_weight(H, w);
  rep.claims.push_back(claim_bool("1_X - 1_Y is a multiplier", true, mo.T.has_value()));
  if (mo.T) {
    const auto k = mo.T->rows();
    rep.claims.push_back(
        claim_at_most("M_w^2 = I", 0.0, max_abs_diff(*mo.T * *mo.T, CMat::Identity(k, k)), 1e-12));
    const auto iso = is_isometry(H, *mo.T, IsometryMode::exact_hilbert());
    rep.claims.push_back(claim_bool("M_w exactly unitary", true, iso.exact && iso.unitary()));
    rep.claims.push_back(claim_at_most("unitarity defect", 0.0, iso.max_deviation, 1e-12));
  }
  const auto g = build_graph(H);
  rep.claims.push_back(claim_equal("Birkhoff graph components", 2.0,
                                   static_cast<double>(g.components.size()), 0.0));
  bool split = g.components.size() == 2;
  if (split)
    for (const auto& c : g.components) {
      const bool inX = c.front() < F.num_points();
      for (auto v : c) split = split && ((v < F.num_points()) == inX);
    }
  rep.claims.push_back(claim_bool("components are X and Y", true, split));
  const auto o = try_verdict(H, w);
  rep.claims.push_back(claim_bool("rigidity verdict is a non-scalar witness", true,
                                  o.report && !o.report->verdict.scalar()));
  if (o.report) {
    rep.claims.push_back(claim_equal("false scalar verdicts", 0.0, false_scalar(*o.report, 1e-7), 0.0));
    rep.claims.push_back(claim_equal("hard edges with distinct weights", 0.0,
                                     static_cast<double>(hard_edge_violations(g, w, o.report->isometry, 1e-7)), 0.0));
  }
  rep.artifacts.emplace_back("model", json::dump(json::to_json(H)));
  rep.artifacts.emplace_back("graph", json::dump(json::to_json(g)));
  rep.artifacts.emplace_back("dot", export_dot(g));
  return rep;
}

CorpusReport run_cinfty_nonrigidity(int n_points, std::uint64_t seed) {
  require(n_points >= 2, ErrorCode::InvalidArgument, "run_cinfty_nonrigidity needs n_points >= 2");
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "cinfty_nonrigidity";
  const auto n = static_cast<std::size_t>(n_points);
  std::vector<double> x(n);
  const double h = 1.0 / (n_points - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = i * h + (i > 0 && i + 1 < n ? rng.uniform(-0.2, 0.2) * h : 0.0);
  const FunctionSpaceModel C(PhaseSpace::with_metric(numbered("x", n), line_metric(x), 1.5 * h),
                             CMat::Identity(n_points, n_points), NormSpec::lp(kInf, n));
  rep.claims.push_back(claim_bool("proximity graph connected", true, C.phase().proximity_connected()));

  int exact = 0, witnesses = 0, false_scalars = 0, rejected = 0;
  double worst_dev = 0.0;
  std::size_t hard = 0;
  std::optional<BirkhoffGraph> graph;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    std::vector<cplx> w(n);
    for (auto& z : w) z = rng.unimodular();
    const auto mo = mo_from_weight(C, w);
    if (!mo.T) {
      ++rejected;
      continue;
    }
    const auto iso = is_isometry(C, *mo.T, IsometryMode::sampled(200, seed + static_cast<std::uint64_t>(t)));
    if (iso.exact && iso.unitary()) ++exact;
    worst_dev = std::max(worst_dev, iso.max_deviation);
    const auto o = try_verdict(C, w);
    if (!o.report) {
      ++rejected;
      continue;
    }
    if (!graph) graph = build_graph(C);
    hard += hard_edge_violations(*graph, w, o.report->isometry, 1e-7);
    if (o.report->verdict.scalar()) ++false_scalars;
    else ++witnesses;
  }
  rep.claims.push_back(claim_equal("random unimodular weights with exact unitary M_w", trials, exact, 0.0));
  rep.claims.push_back(claim_at_most("max isometry deviation", 0.0, worst_dev, 1e-12));
  rep.claims.push_back(claim_equal("weights rejected by the pipeline", 0.0, rejected, 0.0));
  rep.claims.push_back(claim_equal("scalar verdicts for nonconstant weights", 0.0, false_scalars, 0.0));
  rep.claims.push_back(claim_equal("non-scalar witnesses", trials, witnesses, 0.0));
  rep.claims.push_back(claim_equal("hard edges with distinct weights", 0.0, static_cast<double>(hard), 0.0));
  if (graph) {
    rep.claims.push_back(claim_equal("Birkhoff graph edges", 0.0, static_cast<double>(graph->edges.size()), 0.0));
    rep.claims.push_back(claim_bool("Birkhoff graph disconnected", true, !graph->connected()));
  }
  const cplx c = rng.unimodular();
  const auto o = try_verdict(C, std::vector<cplx>(n, c));
  rep.claims.push_back(claim_bool("constant weight gives a scalar verdict", true,
                                  o.report && o.report->verdict.scalar()));
  if (o.report)
    rep.claims.push_back(claim_equal("constant weight eigenvalue error", 0.0,
                                     std::abs(o.report->verdict.lambda - c), 1e-12));
  return rep;
}

CorpusReport run_hilbert_rigidity(const KernelModelParams& params, std::uint64_t seed) {
  require(params.n_points >= 2 && params.models >= 1, ErrorCode::InvalidArgument,
          "run_hilbert_rigidity needs at least 2 points and 1 model");
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "hilbert_rigidity";
  int connected = 0, passing = 0, scalar = 0, false_scalars = 0;
  double worst_dev = 0.0;
  std::size_t hard = 0;
  std::optional<FunctionSpaceModel> first;
  for (int mdl = 0; mdl < params.models; ++mdl) {
    const auto F = gaussian_kernel_model(rng, "x", params.n_points, params.spacing, params.bandwidth);
    if (!first) first = F;
    const auto g = build_graph(F);
    if (g.connected()) ++connected;
    const auto k = static_cast<Eigen::Index>(F.dim());
    std::vector<cplx> w(F.num_points());
    for (auto& z : w) z = rng.unimodular();
    std::vector<CMat> candidates = {rng.unimodular() * CMat::Identity(k, k), rng.unitary(k),
                                    *mo_from_weight(F, w).T};
    for (const auto& T : candidates) {
      const auto d = detect_mo(F, T);
      if (!d.is_mo) continue;
      const auto iso = is_isometry(F, T, IsometryMode::exact_hilbert());
      if (!iso.unitary()) continue;
      ++passing;
      const auto r = rigidity_verdict_operator(F, T);
      if (r.verdict.scalar()) ++scalar;
      if (false_scalar(r, 1e-7)) ++false_scalars;
      worst_dev = std::max(worst_dev, r.max_weight_deviation);
      hard += hard_edge_violations(g, d.omega, iso, 1e-7);
    }
  }
  rep.claims.push_back(claim_equal("connected Birkhoff graphs", params.models, connected, 0.0));
  rep.claims.push_back(claim_at_least("unitary multiplication operators found", params.models, passing, 0.0));
  rep.claims.push_back(claim_equal("scalar verdicts among them", passing, scalar, 0.0));
  rep.claims.push_back(claim_at_most("max weight deviation", 0.0, worst_dev, 1e-7));
  rep.claims.push_back(claim_equal("false scalar verdicts", 0.0, false_scalars, 0.0));
  rep.claims.push_back(claim_equal("hard edges with distinct weights", 0.0, static_cast<double>(hard), 0.0));

  int rejected = 0;
  for (int t = 0; t < params.weights; ++t) {
    std::vector<cplx> w(first->num_points());
    for (auto& z : w) z = rng.unimodular();
    if (!nonconstant(w, 1e-6)) continue;
    if (try_verdict(*first, w).rejected) ++rejected;
  }
  rep.claims.push_back(claim_equal("nonconstant unimodular weights rejected", params.weights, rejected, 0.0));
  const auto oi = try_verdict(*first, std::vector<cplx>(first->num_points(), cplx(0.0, 1.0)));
  rep.claims.push_back(claim_bool("constant weight i gives a scalar verdict", true,
                                  oi.report && oi.report->verdict.scalar()));
  if (oi.report)
    rep.claims.push_back(claim_equal("constant weight eigenvalue error", 0.0,
                                     std::abs(oi.report->verdict.lambda - cplx(0.0, 1.0)), 1e-12));

  CMat K(2, 2);
  K << 1.0, 0.5, 0.5, 1.0;
  const auto two = hilbert_kernel_model(PhaseSpace::bare(numbered("x", 2)), K);
  rep.claims.push_back(claim_bool("two points with Gram 1/2: weight (1, -1) rejected", true,
                                  try_verdict(two, {1.0, -1.0}).rejected.has_value()));
  rep.claims.push_back(claim_bool("two points with Gram 1/2: weight (1, i) rejected", true,
                                  try_verdict(two, {1.0, cplx(0.0, 1.0)}).rejected.has_value()));
  return rep;
}

CorpusReport run_lip_components(std::uint64_t seed) {
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "lip_components";
  const double step = rng.uniform(0.05, 0.1);
  const double gap = rng.uniform(0.3, 0.55);
  std::vector<double> x = {0.0, step, 2.0 * step};
  for (int i = 0; i < 3; ++i) x.push_back(2.0 * step + gap + i * step);
  const RMat d = line_metric(x);
  const std::size_t z = 0;
  const auto F = lipschitz_space(d, z, true, 0.15);
  const std::size_t nA = 3;

  rep.claims.push_back(claim_equal("metric components", 2.0,
                                   static_cast<double>(F.phase().proximity_components().size()), 0.0));
  double cross_max = 0.0, cross_min = kInf;
  for (std::size_t a = 0; a < nA; ++a)
    for (std::size_t b = nA; b < x.size(); ++b) {
      cross_max = std::max(cross_max, d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      cross_min = std::min(cross_min, d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
  rep.claims.push_back(claim_at_most("largest cross-component distance below 1", 1.0, cross_max, 0.0));
  rep.claims.push_back(claim_record("component gap", cross_min));

  const NormSpec& norm = F.coeff_norm();
  double best = -kInf, norm_dev = 0.0, diff_dev = 0.0;
  std::size_t bw = 0, by = 0;
  for (std::size_t w = nA; w < x.size(); ++w)
    for (std::size_t y = 0; y < nA; ++y) {
      const auto ew = point_evaluation(F, w);
      const auto ey = point_evaluation(F, y);
      const double nw = dual_norm_eval(norm, ew);
      const double nd = dual_norm_eval(norm, Functional{ew.coeffs - ey.coeffs});
      const auto W = static_cast<Eigen::Index>(w);
      norm_dev = std::max(norm_dev, std::abs(nw - std::max(1.0, d(W, static_cast<Eigen::Index>(z)))));
      diff_dev = std::max(diff_dev, std::abs(nd - d(W, static_cast<Eigen::Index>(y))));
      if (nw - nd > best) {
        best = nw - nd;
        bw = w;
        by = y;
      }
    }
  rep.claims.push_back(claim_equal("||w_F|| = max(1, d(w, z)) on cross pairs", 0.0, norm_dev, 1e-6));
  rep.claims.push_back(claim_equal("||w_F - y_F|| = d(w, y) on cross pairs", 0.0, diff_dev, 1e-6));
  rep.claims.push_back(claim_at_least("||w_F|| - ||w_F - y_F|| for the best cross pair", 0.0, best, 0.0));
  rep.claims.push_back(claim_bool("certifying inequality ||w_F - y_F|| < ||w_F||", true, best > 1e-6));

  const auto g = build_graph(F);
  rep.claims.push_back(claim_bool("Birkhoff graph connected", true, g.connected()));
  rep.claims.push_back(claim_bool("certifying pair is an edge", true, g.has_edge(bw, by)));

  std::vector<cplx> split(x.size(), 1.0);
  for (std::size_t i = nA; i < x.size(); ++i) split[i] = -1.0;
  const auto os = try_verdict(F, split);
  rep.claims.push_back(claim_bool("weight +1 / -1 by metric component rejected", true, os.rejected.has_value()));

  int scalar_ok = 0, bad = 0;
  const int trials = 10;
  for (int t = 0; t < trials; ++t) {
    std::vector<cplx> w(x.size());
    const cplx a = rng.unimodular(), b = rng.unimodular();
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = t % 2 == 0 ? (i < nA ? a : b) : a;
    const auto o = try_verdict(F, w);
    const bool noncon = nonconstant(w, 1e-6);
    if (o.report) {
      if (noncon || !o.report->verdict.scalar()) ++bad;
      else ++scalar_ok;
    } else if (!noncon) {
      ++bad;
    }
  }
  rep.claims.push_back(claim_equal("constant weights with scalar verdicts", trials / 2, scalar_ok, 0.0));
  rep.claims.push_back(claim_equal("isometric candidates with non-scalar outcome", 0.0, bad, 0.0));
  rep.artifacts.emplace_back("graph", json::dump(json::to_json(g)));
  rep.artifacts.emplace_back("dot", export_dot(g));
  return rep;
}

CorpusReport run_nsc_probe() {
  Rng rng(0x45c);
  CorpusReport rep;
  rep.scenario = "nsc_probe";
  std::size_t worst = 0;
  const auto l2 = NormSpec::lp(2.0, 3);
  CMat A = rng.cmat(3, 3);
  const auto H = NormSpec::hilbert(A * A.adjoint() + CMat::Identity(3, 3));
  for (const auto* spec : {&l2, &H})
    for (int s = 0; s < 50; ++s) {
      CVec v = rng.cvec(3);
      v /= norm_eval(*spec, v);
      worst = std::max(worst, sphere_face_dimension(*spec, v));
    }
  rep.claims.push_back(claim_equal("sphere face dimension for l2 and Hilbert norms (100 samples)",
                                   0.0, static_cast<double>(worst), 0.0));

  RMat sq(4, 2);
  sq << 1, 0, -1, 0, 0, 1, 0, -1;
  for (int N = 2; N <= 4; ++N) {
    std::vector<NormSpec> blocks(static_cast<std::size_t>(N), NormSpec::polyhedral(sq));
    const auto D = NormSpec::block_sum(blocks, RhoCombiner::outer_lp(2.0));
    double rho2 = 0.0;
    for (int n = 1; n <= N; ++n) rho2 += 1.0 / (n * n);
    const double rho = std::sqrt(rho2);
    auto sample = [&] {
      CVec v(2 * N);
      for (int n = 1; n <= N; ++n) {
        v[2 * (n - 1)] = 1.0 / n;
        v[2 * (n - 1) + 1] = rng.uniform(-1.0, 1.0) / n;
      }
      return v;
    };
    std::vector<CVec> pts;
    double block_dev = 0.0, norm_dev = 0.0, mid_dev = 0.0;
    for (int s = 0; s < 40; ++s) {
      pts.push_back(sample());
      for (int n = 1; n <= N; ++n)
        block_dev = std::max(block_dev, std::abs(norm_eval(blocks[0], pts.back().segment(2 * (n - 1), 2)) - 1.0 / n));
      norm_dev = std::max(norm_dev, std::abs(norm_eval(D, pts.back()) - rho));
    }
    for (std::size_t s = 1; s < pts.size(); ++s)
      mid_dev = std::max(mid_dev, std::abs(norm_eval(D, 0.5 * (pts[s] + pts[s - 1])) - rho));
    const std::string tag = "N = " + std::to_string(N) + ": ";
    rep.claims.push_back(claim_equal(tag + "block norms equal 1/n", 0.0, block_dev, 1e-12));
    rep.claims.push_back(claim_equal(tag + "total norm equals ||(1/n)||_2", 0.0, norm_dev, 1e-12));
    rep.claims.push_back(claim_equal(tag + "midpoints stay on the sphere", 0.0, mid_dev, 1e-12));
    rep.claims.push_back(claim_equal(tag + "affine dimension of the sampled product", N,
                                     static_cast<double>(affine_dimension(pts)), 0.0));
    CVec center = CVec::Zero(2 * N);
    for (int n = 1; n <= N; ++n) center[2 * (n - 1)] = 1.0 / n;
    rep.claims.push_back(claim_equal(tag + "sphere face dimension at the product center", N,
                                     static_cast<double>(sphere_face_dimension(D, center / rho)), 0.0));
  }

  const auto h1c = NormSpec::block_sum({NormSpec::hilbert(CMat::Identity(2, 2)), NormSpec::lp(2.0, 1)},
                                       RhoCombiner::outer_lp(1.0));
  std::size_t h1 = 0;
  for (int s = 0; s < 50; ++s) {
    CVec v = rng.cvec(3);
    v /= norm_eval(h1c, v);
    h1 = std::max(h1, sphere_face_dimension(h1c, v));
  }
  rep.claims.push_back(claim_at_most("H (+)_1 C sphere face dimension (50 samples)", 1.0,
                                     static_cast<double>(h1), 0.0));
  return rep;
}

CorpusReport run_counterexample_search(std::uint64_t seed, int trials) {
  Rng rng(seed);
  CorpusReport rep;
  rep.scenario = "counterexample_search";
  int connected = 0, multipliers = 0, unitaries = 0;
  json::Json found = json::Json::array();
  for (int t = 0; t < trials; ++t) {
    const int m = rng.integer(3, 5);
    std::optional<FunctionSpaceModel> F;
    switch (t % 3) {
      case 0: F = gaussian_kernel_model(rng, "x", m, 0.3, 0.5); break;
      case 1: {
        std::vector<double> x(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = 0.2 * i + rng.uniform(0.0, 0.05);
        F = lipschitz_space(line_metric(x), 0, true, 0.3);
        break;
      }
      default: {
        const double ps[] = {1.0, 3.0, kInf};
        F = FunctionSpaceModel(PhaseSpace::bare(numbered("x", static_cast<std::size_t>(m))),
                               rng.cmat(m, m), NormSpec::lp(ps[rng.integer(0, 2)], static_cast<std::size_t>(m)));
      }
    }
    const auto g = build_graph(*F);
    if (!g.connected()) continue;
    ++connected;
    // Two-valued weight on a random nontrivial split.
    std::vector<cplx> w(static_cast<std::size_t>(m));
    const cplx a = rng.unimodular(), b = rng.unimodular();
    const int cut = rng.integer(1, m - 1);
    for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(i)] = i < cut ? a : b;
    const auto mo = mo_from_weight(*F, w);
    if (!mo.T) continue;
    ++multipliers;
    const auto iso = is_isometry(*F, *mo.T, default_mode(*F));
    if (!iso.unitary()) continue;
    ++unitaries;
    found.push_back({{"trial", t}, {"model", json::to_json(*F)}, {"omega", json::to_json(w)},
                     {"isometry", json::to_json(iso)}});
  }
  rep.claims.push_back(claim_record("models searched", trials));
  rep.claims.push_back(claim_record("connected models", connected));
  rep.claims.push_back(claim_record("nonconstant multipliers", multipliers));
  rep.claims.push_back(claim_record("counterexample candidates", unitaries));
  rep.artifacts.emplace_back("candidates", json::dump(found));
  return rep;
}

std::vector<std::string> scenario_names() {
  return {"lipschitz_mo",       "rkhs_shift",       "rkhs_bilateral",
          "disjoint_sum",       "cinfty_nonrigidity", "hilbert_rigidity",
          "lip_components",     "nsc_probe",        "counterexample_search"};
}

CorpusReport run_scenario(const std::string& name, std::uint64_t seed) {
  if (name == "lipschitz_mo") return run_lipschitz_mo(40, seed);
  if (name == "rkhs_shift") return run_rkhs_shift(50, 64);
  if (name == "rkhs_bilateral") return run_rkhs_bilateral(8);
  if (name == "disjoint_sum") return run_disjoint_sum(seed);
  if (name == "cinfty_nonrigidity") return run_cinfty_nonrigidity(40, seed);
  if (name == "hilbert_rigidity") return run_hilbert_rigidity({}, seed);
  if (name == "lip_components") return run_lip_components(seed);
  if (name == "nsc_probe") return run_nsc_probe();
  if (name == "counterexample_search") return run_counterexample_search(seed);
  fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

std::vector<CorpusReport> run_all(std::uint64_t seed) {
  std::vector<CorpusReport> out;
  for (const auto& name : scenario_names()) out.push_back(run_scenario(name, seed));
  return out;
}

}  // namespace nscf
