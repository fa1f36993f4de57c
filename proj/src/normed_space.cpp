#include "nscf/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nscf/error.hpp"
#include "nscf/lp.hpp"

namespace nscf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::IllConditioned: return "ill_conditioned";
    case ErrorCode::UnboundedBall: return "unbounded_ball";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::InvalidMetric: return "invalid_metric";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::ZeroVector: return "zero_vector";
    case ErrorCode::OffSphere: return "off_sphere";
    case ErrorCode::UnknownPoint: return "unknown_point";
    case ErrorCode::NotIndependent: return "not_independent";
    case ErrorCode::NotEigenvector: return "not_eigenvector";
    case ErrorCode::VacuousLemma: return "vacuous_lemma";
    case ErrorCode::NotMultiplier: return "not_multiplier";
    case ErrorCode::NotIsometric: return "not_isometric";
    case ErrorCode::InconsistentComponent: return "inconsistent_component";
    case ErrorCode::IdentityViolated: return "identity_violated";
    case ErrorCode::VacuousCore: return "vacuous_core";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

const char* to_string(NormSpec::Kind kind) {
  switch (kind) {
    case NormSpec::Kind::Lp: return "Lp";
    case NormSpec::Kind::HilbertGram: return "HilbertGram";
    case NormSpec::Kind::Polyhedral: return "Polyhedral";
    case NormSpec::Kind::LipschitzFin: return "LipschitzFin";
    case NormSpec::Kind::BlockSum: return "BlockSum";
  }
  return "unknown";
}

struct NormSpec::Data {
  Kind kind = Kind::Lp;
  std::size_t dim = 0;
  double p = 2.0;
  CMat gram;
  CMat gram_inv;
  RMat facets;
  RMat metric;
  std::size_t basepoint = 0;
  bool penalize = true;
  std::vector<NormSpec> blocks;
  RhoCombiner combiner;
  std::vector<std::size_t> offsets;
  bool real_scalars = false;
  bool conj_sym = true;
};

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dims_msg(const char* what, std::size_t want, std::size_t got) {
  std::ostringstream os;
  os << what << ": expected dimension " << want << ", got " << got;
  return os.str();
}

void check_dim(const NormSpec& spec, Eigen::Index n, const char* what) {
  require(static_cast<std::size_t>(n) == spec.dim(), ErrorCode::DimensionMismatch,
          dims_msg(what, spec.dim(), static_cast<std::size_t>(n)));
}

double lp_norm(const CVec& v, double p) {
  if (v.size() == 0) return 0.0;
  const RVec a = v.cwiseAbs();
  const double m = a.maxCoeff();
  if (std::isinf(p)) return m;
  if (p == 1.0) return a.sum();
  if (p == 2.0) return v.norm();
  if (m == 0.0) return 0.0;
  return m * std::pow((a / m).array().pow(p).sum(), 1.0 / p);
}

double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

RVec real_part_checked(const CVec& v) {
  const double scale = std::max(1.0, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  require(v.size() == 0 || v.imag().cwiseAbs().maxCoeff() <= 1e-12 * scale,
          ErrorCode::InvalidArgument, "real-scalar norm applied to a complex vector");
  return v.real();
}

// phi = phase * r with r real, when possible.
bool real_up_to_phase(const CVec& phi, RVec& r, cplx& phase) {
  if (phi.size() == 0) {
    r = RVec();
    phase = 1.0;
    return true;
  }
  Eigen::Index piv = 0;
  const double m = phi.cwiseAbs().maxCoeff(&piv);
  if (m == 0.0) {
    r = RVec::Zero(phi.size());
    phase = 1.0;
    return true;
  }
  phase = phi[piv] / m;
  const CVec rot = phi * std::conj(phase);
  if (rot.imag().cwiseAbs().maxCoeff() > 1e-13 * m) return false;
  r = rot.real();
  return true;
}

void validate_metric_impl(const RMat& d) {
  require(d.rows() == d.cols() && d.rows() >= 1, ErrorCode::InvalidMetric,
          "metric must be a non-empty square matrix");
  const Eigen::Index m = d.rows();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m; ++i) {
    require(std::isfinite(d(i, i)) && std::abs(d(i, i)) <= 1e-12 * scale,
            ErrorCode::InvalidMetric, "metric diagonal must be zero");
    for (Eigen::Index j = 0; j < m; ++j) {
      require(std::isfinite(d(i, j)), ErrorCode::InvalidMetric, "metric entry not finite");
      require(std::abs(d(i, j) - d(j, i)) <= 1e-12 * scale, ErrorCode::InvalidMetric,
              "metric must be symmetric");
      if (i != j) {
        require(d(i, j) > 0.0, ErrorCode::InvalidMetric,
                "metric has zero distance between distinct points " + std::to_string(i) +
                    " and " + std::to_string(j));
      }
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k)
        require(d(i, k) <= d(i, j) + d(j, k) + 1e-12 * scale, ErrorCode::InvalidMetric,
                "metric violates the triangle inequality");
}

// Coefficient index of a vertex in a Lipschitz spec, or -1 for the pinned
// basepoint.
Eigen::Index lip_coeff(const NormSpec::Data& d, std::size_t vertex) {
  if (d.penalize) return static_cast<Eigen::Index>(vertex);
  if (vertex == d.basepoint) return -1;
  return static_cast<Eigen::Index>(vertex < d.basepoint ? vertex : vertex - 1);
}

CVec lipschitz_values(const NormSpec::Data& d, const CVec& v) {
  const std::size_t m = static_cast<std::size_t>(d.metric.rows());
  CVec full = CVec::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t x = 0; x < m; ++x) {
    const Eigen::Index c = lip_coeff(d, x);
    if (c >= 0) full[static_cast<Eigen::Index>(x)] = v[c];
  }
  return full;
}

// ---------------------------------------------------------------------------
// Dual norms through linear programming

double lp_value_or_throw(const lp::Result& res) {
  if (res.status == lp::Status::Unbounded)
    fail(ErrorCode::UnboundedBall, "unit ball is unbounded in the dual direction");
  if (res.status == lp::Status::Infeasible)
    fail(ErrorCode::Infeasible, "dual-norm linear program is infeasible (malformed facets)");
  return res.value;
}

double polyhedral_dual_real(const RMat& facets, const RVec& r) {
  if (r.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const RVec ones = RVec::Ones(facets.rows());
  return std::max(0.0, lp_value_or_throw(lp::maximize(r, facets, ones)));
}

template <class F>
double golden_max(F&& h, double lo, double hi, double xtol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = h(c), fd = h(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = h(d);
    }
  }
  return std::max(fc, fd);
}

// Real space with a complex functional: |<f, phi>| = max_theta <f, Re(e^{-i theta} phi)>.
// Phase grid of 64 angles plus a golden-section refinement around the best one.
double polyhedral_dual(const RMat& facets, const CVec& phi) {
  RVec r;
  cplx phase;
  if (real_up_to_phase(phi, r, phase)) return polyhedral_dual_real(facets, r);
  const RVec re = phi.real();
  const RVec im = phi.imag();
  auto h = [&](double theta) {
    return polyhedral_dual_real(facets, std::cos(theta) * re + std::sin(theta) * im);
  };
  constexpr int kGrid = 64;
  const double step = 2.0 * std::numbers::pi / kGrid;
  double best = -1.0, best_theta = 0.0;
  for (int k = 0; k < kGrid; ++k) {
    const double v = h(k * step);
    if (v > best) {
      best = v;
      best_theta = k * step;
    }
  }
  return std::max(best, golden_max(h, best_theta - step, best_theta + step, 1e-9));
}

double lipschitz_dual_real(const NormSpec::Data& d, const RVec& phi) {
  const std::size_t m = static_cast<std::size_t>(d.metric.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(d.dim);
  const Eigen::Index L = k;
  const Eigen::Index S = k + 1;
  const Eigen::Index nvar = d.penalize ? k + 2 : k + 1;
  const std::size_t npairs = m * (m - 1) / 2;
  const Eigen::Index nrows = static_cast<Eigen::Index>(2 * npairs) + (d.penalize ? 5 : 2);
  RMat A = RMat::Zero(nrows, nvar);
  RVec b = RVec::Zero(nrows);
  Eigen::Index row = 0;
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = x + 1; y < m; ++y) {
      const Eigen::Index cx = lip_coeff(d, x), cy = lip_coeff(d, y);
      const double dist = d.metric(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      for (double sgn : {1.0, -1.0}) {
        if (cx >= 0) A(row, cx) = sgn;
        if (cy >= 0) A(row, cy) = -sgn;
        A(row, L) = -dist;
        ++row;
      }
    }
  }
  if (d.penalize) {
    const Eigen::Index z = static_cast<Eigen::Index>(d.basepoint);
    A(row, z) = 1.0;
    A(row, S) = -1.0;
    ++row;
    A(row, z) = -1.0;
    A(row, S) = -1.0;
    ++row;
    A(row, L) = 1.0;
    A(row, S) = 1.0;
    b[row] = 1.0;
    ++row;
    A(row, L) = -1.0;
    ++row;
    A(row, S) = -1.0;
    ++row;
  } else {
    A(row, L) = 1.0;
    b[row] = 1.0;
    ++row;
    A(row, L) = -1.0;
    ++row;
  }
  RVec c = RVec::Zero(nvar);
  c.head(k) = phi;
  return std::max(0.0, lp_value_or_throw(lp::maximize(c, A, b)));
}

// Complex Lipschitz functions: the modulus constraints |f(x) - f(y)| <= L d
// are second-order cones. They are enforced by cutting planes
// Re(e^{-i t} (f(x) - f(y))) <= L d, adding the violated direction until all
// cones hold to relative accuracy tol.
double lipschitz_dual_complex(const NormSpec::Data& d, const CVec& phi, double tol) {
  const std::size_t m = static_cast<std::size_t>(d.metric.rows());
  const Eigen::Index k = static_cast<Eigen::Index>(d.dim);
  const Eigen::Index L = 2 * k;
  const Eigen::Index S = 2 * k + 1;
  const Eigen::Index nvar = d.penalize ? 2 * k + 2 : 2 * k + 1;

  struct Cone {
    Eigen::Index a, b;  // coefficient indices (-1 for pinned zero)
    double dist;        // 0 marks the basepoint cone |f(z)| <= s
    std::vector<double> dirs;
  };
  std::vector<Cone> cones;
  const std::vector<double> init = {0.0, std::numbers::pi / 2, std::numbers::pi,
                                    3 * std::numbers::pi / 2};
  for (std::size_t x = 0; x < m; ++x)
    for (std::size_t y = x + 1; y < m; ++y)
      cones.push_back({lip_coeff(d, x), lip_coeff(d, y),
                       d.metric(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)),
                       init});
  if (d.penalize) cones.push_back({static_cast<Eigen::Index>(d.basepoint), -1, 0.0, init});

  RVec c = RVec::Zero(nvar);
  c.head(k) = phi.real();
  c.segment(k, k) = -phi.imag();

  double value = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    std::size_t nrows = d.penalize ? 3 : 2;
    for (const auto& cone : cones) nrows += cone.dirs.size();
    RMat A = RMat::Zero(static_cast<Eigen::Index>(nrows), nvar);
    RVec b = RVec::Zero(static_cast<Eigen::Index>(nrows));
    Eigen::Index row = 0;
    for (const auto& cone : cones) {
      for (double t : cone.dirs) {
        const double ct = std::cos(t), st = std::sin(t);
        if (cone.a >= 0) {
          A(row, cone.a) += ct;
          A(row, k + cone.a) += st;
        }
        if (cone.b >= 0) {
          A(row, cone.b) -= ct;
          A(row, k + cone.b) -= st;
        }
        if (cone.dist > 0.0)
          A(row, L) = -cone.dist;
        else
          A(row, S) = -1.0;
        ++row;
      }
    }
    if (d.penalize) {
      A(row, L) = 1.0;
      A(row, S) = 1.0;
      b[row++] = 1.0;
      A(row++, L) = -1.0;
      A(row++, S) = -1.0;
    } else {
      A(row, L) = 1.0;
      b[row++] = 1.0;
      A(row++, L) = -1.0;
    }
    const lp::Result res = lp::maximize(c, A, b);
    value = lp_value_or_throw(res);
    const RVec& x = res.x;
    bool violated = false;
    for (auto& cone : cones) {
      cplx w = 0.0;
      if (cone.a >= 0) w += cplx(x[cone.a], x[k + cone.a]);
      if (cone.b >= 0) w -= cplx(x[cone.b], x[k + cone.b]);
      const double bound = cone.dist > 0.0 ? cone.dist * x[L] : x[S];
      if (std::abs(w) > bound * (1.0 + tol) + 1e-14) {
        cone.dirs.push_back(std::arg(w));
        violated = true;
      }
    }
    if (!violated) break;
  }
  return std::max(0.0, value);
}

double lipschitz_dual(const NormSpec::Data& d, const CVec& phi, double tol) {
  RVec r;
  cplx phase;
  if (real_up_to_phase(phi, r, phase)) return lipschitz_dual_real(d, r);
  return lipschitz_dual_complex(d, phi, tol);
}

// ---------------------------------------------------------------------------
// Faces

CVec unit_phase(const CVec& v) {
  CVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a == 0.0 ? cplx(1.0) : v[i] / a;
  }
  return out;
}

std::vector<Eigen::Index> active_facets(const RMat& facets, const RVec& x, double tol) {
  const RVec vals = facets * x;
  const double nrm = vals.maxCoeff();
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < facets.rows(); ++j)
    if (vals[j] >= nrm - tol * std::max(nrm, 1e-300)) out.push_back(j);
  return out;
}

// Dimension of the face {x in ball : <a_j, x> = 1}; -1 when empty.
int polyhedral_facet_face_dim(const RMat& facets, Eigen::Index j,
                              const std::vector<Eigen::Index>& candidates) {
  const Eigen::Index d = facets.cols();
  RMat A(facets.rows() + 1, d);
  A.topRows(facets.rows()) = facets;
  A.row(facets.rows()) = -facets.row(j);
  RVec b = RVec::Ones(facets.rows() + 1);
  b[facets.rows()] = -1.0;

  std::vector<RVec> equalities;
  for (Eigen::Index k : candidates) {
    if (k == j) {
      equalities.push_back(facets.row(k).transpose());
      continue;
    }
    const lp::Result res = lp::maximize(-facets.row(k).transpose(), A, b);
    if (res.status == lp::Status::Infeasible) return -1;
    if (res.status != lp::Status::Optimal) continue;
    if (-res.value >= 1.0 - 1e-9) equalities.push_back(facets.row(k).transpose());
  }
  RMat E(d, static_cast<Eigen::Index>(equalities.size()));
  for (std::size_t i = 0; i < equalities.size(); ++i)
    E.col(static_cast<Eigen::Index>(i)) = equalities[i];
  Eigen::FullPivLU<RMat> lu(E);
  lu.setThreshold(1e-9);
  return static_cast<int>(d - lu.rank());
}

std::size_t polyhedral_sphere_face_dim(const RMat& facets, const RVec& x, double tol) {
  const auto active = active_facets(facets, x, tol);
  int best = 0;
  for (Eigen::Index j : active) best = std::max(best, polyhedral_facet_face_dim(facets, j, active));
  return static_cast<std::size_t>(best);
}

std::size_t polyhedral_max_face_dim(const RMat& facets) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(facets.rows()));
  for (Eigen::Index j = 0; j < facets.rows(); ++j) all[static_cast<std::size_t>(j)] = j;
  int best = 0;
  for (Eigen::Index j = 0; j < facets.rows(); ++j)
    best = std::max(best, polyhedral_facet_face_dim(facets, j, all));
  return static_cast<std::size_t>(best);
}

std::size_t real_dimension(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormSpec::Kind::Polyhedral: return spec.dim();
    case NormSpec::Kind::BlockSum: {
      std::size_t s = 0;
      for (const auto& b : spec.blocks()) s += real_dimension(b);
      return s;
    }
    default: return 2 * spec.dim();
  }
}

std::size_t unit_sphere_face_dim(const NormSpec& spec, const CVec& e, double tol);

std::size_t max_sphere_face_dim(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormSpec::Kind::Lp:
      if (std::isinf(spec.p())) return spec.dim() > 1 ? 2 * (spec.dim() - 1) : 0;
      if (spec.p() == 1.0) return spec.dim() - 1;
      return 0;
    case NormSpec::Kind::HilbertGram: return 0;
    case NormSpec::Kind::Polyhedral: return polyhedral_max_face_dim(spec.facets());
    default:
      fail(ErrorCode::Unsupported,
           std::string("sphere faces are not computed for ") + to_string(spec.kind()));
  }
}

std::size_t unit_sphere_face_dim(const NormSpec& spec, const CVec& e, double tol) {
  switch (spec.kind()) {
    case NormSpec::Kind::HilbertGram: return 0;
    case NormSpec::Kind::Lp:
      if (std::isinf(spec.p()) || spec.p() == 1.0) return max_sphere_face_dim(spec);
      return 0;
    case NormSpec::Kind::Polyhedral:
      return polyhedral_sphere_face_dim(spec.facets(), real_part_checked(e), tol);
    case NormSpec::Kind::BlockSum: {
      const auto& blocks = spec.blocks();
      const auto& off = spec.block_offsets();
      const RhoCombiner& rho = spec.combiner();
      std::vector<double> r(blocks.size());
      std::vector<CVec> seg(blocks.size());
      for (std::size_t n = 0; n < blocks.size(); ++n) {
        seg[n] = e.segment(static_cast<Eigen::Index>(off[n]),
                           static_cast<Eigen::Index>(blocks[n].dim()));
        r[n] = norm_eval(blocks[n], seg[n]);
      }
      const double scale = std::max(1e-300, *std::max_element(r.begin(), r.end()));
      auto nonzero = [&](std::size_t n) { return r[n] > tol * scale; };
      if (std::isinf(rho.p)) {
        std::size_t total = 0;
        for (const auto& b : blocks) total += real_dimension(b);
        std::size_t best = 0;
        for (std::size_t n = 0; n < blocks.size(); ++n) {
          if (rho.weight(n) * r[n] < 1.0 - tol) continue;
          const std::size_t own = unit_sphere_face_dim(blocks[n], seg[n] / r[n], tol);
          best = std::max(best, own + total - real_dimension(blocks[n]));
        }
        return best;
      }
      if (rho.p == 1.0) {
        std::size_t sum = 0;
        bool any = false;
        for (std::size_t n = 0; n < blocks.size(); ++n) {
          if (nonzero(n)) {
            sum += unit_sphere_face_dim(blocks[n], seg[n] / r[n], tol) + 1;
            any = true;
          } else {
            sum += max_sphere_face_dim(blocks[n]) + 1;
          }
        }
        return any ? sum - 1 : sum;
      }
      // Strictly convex, monotone outer norm: block norms are frozen along any
      // segment in the sphere, so the face is a product of block faces.
      std::size_t sum = 0;
      for (std::size_t n = 0; n < blocks.size(); ++n)
        if (nonzero(n)) sum += unit_sphere_face_dim(blocks[n], seg[n] / r[n], tol);
      return sum;
    }
    case NormSpec::Kind::LipschitzFin:
      break;
  }
  fail(ErrorCode::Unsupported, "sphere faces are not computed for LipschitzFin norms");
}

// Norming functionals of Lipschitz norms: dil part from the pairs attaining
// the dilation (molecules), basepoint part from the phase of f(z).
SupportFace lipschitz_face(const NormSpec::Data& d, const CVec& e, double tol) {
  const CVec v = lipschitz_values(d, e);
  const Eigen::Index m = v.size();
  const double D = dil(d.metric, v);
  SupportFace face;

  std::vector<CVec> dil_part;
  if (D > 0.0) {
    for (Eigen::Index x = 0; x < m; ++x)
      for (Eigen::Index y = 0; y < m; ++y) {
        if (x == y) continue;
        const cplx w = v[x] - v[y];
        const double q = std::abs(w) / d.metric(x, y);
        if (q < D * (1.0 - tol) || std::real(w) < 0 || (std::real(w) == 0 && std::imag(w) < 0))
          continue;
        CVec nu = CVec::Zero(m);
        const cplx ph = std::conj(w / std::abs(w)) / d.metric(x, y);
        nu[x] = ph;
        nu[y] = -ph;
        dil_part.push_back(nu);
      }
  } else {
    // Constant values: every molecule is norming for the dil part.
    face.approximate = true;
    dil_part.push_back(CVec::Zero(m));
  }

  std::vector<CVec> base_part = {CVec::Zero(m)};
  if (d.penalize) {
    const cplx fz = v[static_cast<Eigen::Index>(d.basepoint)];
    base_part.clear();
    if (std::abs(fz) > tol * std::max(1e-300, e.cwiseAbs().maxCoeff())) {
      CVec nu = CVec::Zero(m);
      nu[static_cast<Eigen::Index>(d.basepoint)] = std::conj(fz / std::abs(fz));
      base_part.push_back(nu);
    } else {
      face.approximate = true;
      for (cplx ph : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
        CVec nu = CVec::Zero(m);
        nu[static_cast<Eigen::Index>(d.basepoint)] = ph;
        base_part.push_back(nu);
      }
    }
  }

  for (const auto& a : dil_part)
    for (const auto& b : base_part) {
      const CVec full = a + b;
      CVec coeffs(static_cast<Eigen::Index>(d.dim));
      for (Eigen::Index x = 0; x < m; ++x) {
        const Eigen::Index c = lip_coeff(d, static_cast<std::size_t>(x));
        if (c >= 0) coeffs[c] = full[x];
      }
      face.extreme.push_back({coeffs});
    }
  face.unique = !face.approximate && face.extreme.size() == 1;
  return face;
}

}  // namespace

// ---------------------------------------------------------------------------
// RhoCombiner

RhoCombiner RhoCombiner::outer_lp(double p) {
  require(p >= 1.0, ErrorCode::InvalidArgument, "outer exponent must be >= 1");
  return RhoCombiner{p, {}};
}

RhoCombiner RhoCombiner::weighted_outer_lp(double p, std::vector<double> weights) {
  require(p >= 1.0, ErrorCode::InvalidArgument, "outer exponent must be >= 1");
  for (double w : weights)
    require(w > 0.0 && std::isfinite(w), ErrorCode::InvalidArgument,
            "combiner weights must be positive");
  return RhoCombiner{p, std::move(weights)};
}

double RhoCombiner::combine(std::span<const double> r) const {
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) m = std::max(m, weight(n) * r[n]);
    return m;
  }
  double m = 0.0;
  for (double x : r) m = std::max(m, x);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t n = 0; n < r.size(); ++n) s += weight(n) * std::pow(r[n] / m, p);
  return m * std::pow(s, 1.0 / p);
}

double RhoCombiner::dual_combine(std::span<const double> s) const {
  if (p == 1.0) {
    double m = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) m = std::max(m, s[n] / weight(n));
    return m;
  }
  if (std::isinf(p)) {
    double sum = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) sum += s[n] / weight(n);
    return sum;
  }
  const double q = conjugate_exponent(p);
  std::vector<double> scaled(s.size());
  double m = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    scaled[n] = s[n] * std::pow(weight(n), -1.0 / p);
    m = std::max(m, scaled[n]);
  }
  if (m == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : scaled) sum += std::pow(x / m, q);
  return m * std::pow(sum, 1.0 / q);
}

// ---------------------------------------------------------------------------
// NormSpec

NormSpec NormSpec::lp(double p, std::size_t dim) {
  require(p >= 1.0, ErrorCode::InvalidArgument, "Lp exponent must be in [1, inf]");
  require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be positive");
  auto d = std::make_shared<Data>();
  d->kind = Kind::Lp;
  d->p = p;
  d->dim = dim;
  return NormSpec(std::move(d));
}

NormSpec NormSpec::hilbert(const CMat& gram) {
  require(gram.rows() == gram.cols() && gram.rows() >= 1, ErrorCode::DimensionMismatch,
          "Gram matrix must be square and non-empty");
  require(gram.allFinite(), ErrorCode::InvalidArgument, "Gram matrix has non-finite entries");
  const double scale = gram.cwiseAbs().maxCoeff();
  require((gram - gram.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-300),
          ErrorCode::NotPositiveDefinite, "Gram matrix is not Hermitian");
  const CMat herm = (gram + gram.adjoint()) / 2.0;
  Eigen::LLT<CMat> llt(herm);
  require(llt.info() == Eigen::Success, ErrorCode::NotPositiveDefinite,
          "Gram matrix is not positive definite");
  Eigen::SelfAdjointEigenSolver<CMat> eig(herm, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  require(lo > 0.0, ErrorCode::NotPositiveDefinite, "Gram matrix is not positive definite");
  require(hi / lo <= 1e12, ErrorCode::IllConditioned,
          "Gram matrix condition number exceeds 1e12");
  auto d = std::make_shared<Data>();
  d->kind = Kind::HilbertGram;
  d->dim = static_cast<std::size_t>(gram.rows());
  d->gram = herm;
  d->gram_inv = llt.solve(CMat::Identity(gram.rows(), gram.cols()));
  d->gram_inv = (d->gram_inv + d->gram_inv.adjoint()).eval() / 2.0;
  d->conj_sym = herm.imag().cwiseAbs().maxCoeff() <= 1e-15 * scale;
  return NormSpec(std::move(d));
}

NormSpec NormSpec::polyhedral(const RMat& facets) {
  require(facets.rows() >= 2 && facets.cols() >= 1, ErrorCode::InvalidArgument,
          "polyhedral norm needs at least two facets");
  require(facets.allFinite(), ErrorCode::InvalidArgument, "facet entries must be finite");
  for (Eigen::Index i = 0; i < facets.rows(); ++i) {
    const double s = facets.row(i).cwiseAbs().maxCoeff();
    require(s > 0.0, ErrorCode::InvalidArgument, "zero facet functional");
    bool mirrored = false;
    for (Eigen::Index j = 0; j < facets.rows() && !mirrored; ++j)
      mirrored = (facets.row(i) + facets.row(j)).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s);
    require(mirrored, ErrorCode::InvalidArgument,
            "facet set must be symmetric under negation (facet " + std::to_string(i) + ")");
  }
  Eigen::FullPivLU<RMat> lu(facets);
  lu.setThreshold(1e-10);
  require(lu.rank() == facets.cols(), ErrorCode::UnboundedBall,
          "facets do not span the space; the unit ball is unbounded");
  auto d = std::make_shared<Data>();
  d->kind = Kind::Polyhedral;
  d->dim = static_cast<std::size_t>(facets.cols());
  d->facets = facets;
  d->real_scalars = true;
  return NormSpec(std::move(d));
}

NormSpec NormSpec::lipschitz(const RMat& metric, std::size_t basepoint,
                             bool penalize_basepoint) {
  validate_metric_impl(metric);
  const auto m = static_cast<std::size_t>(metric.rows());
  require(basepoint < m, ErrorCode::InvalidArgument, "basepoint out of range");
  require(penalize_basepoint || m >= 2, ErrorCode::InvalidArgument,
          "a pinned basepoint needs at least one other point");
  auto d = std::make_shared<Data>();
  d->kind = Kind::LipschitzFin;
  d->metric = metric;
  d->basepoint = basepoint;
  d->penalize = penalize_basepoint;
  d->dim = penalize_basepoint ? m : m - 1;
  return NormSpec(std::move(d));
}

NormSpec NormSpec::block_sum(std::vector<NormSpec> blocks, RhoCombiner combiner) {
  require(!blocks.empty(), ErrorCode::InvalidArgument, "block sum needs at least one block");
  require(combiner.p >= 1.0, ErrorCode::InvalidArgument, "outer exponent must be >= 1");
  require(combiner.weights.empty() || combiner.weights.size() == blocks.size(),
          ErrorCode::DimensionMismatch, "one combiner weight per block is required");
  auto d = std::make_shared<Data>();
  d->kind = Kind::BlockSum;
  std::size_t off = 0;
  for (const auto& b : blocks) {
    d->offsets.push_back(off);
    off += b.dim();
    d->real_scalars = d->real_scalars || b.real_scalars();
    d->conj_sym = d->conj_sym && b.conjugation_symmetric();
  }
  d->dim = off;
  d->blocks = std::move(blocks);
  d->combiner = std::move(combiner);
  return NormSpec(std::move(d));
}

NormSpec::Kind NormSpec::kind() const { return d_->kind; }
std::size_t NormSpec::dim() const { return d_->dim; }
bool NormSpec::real_scalars() const { return d_->real_scalars; }
bool NormSpec::conjugation_symmetric() const { return d_->conj_sym; }
double NormSpec::p() const { return d_->p; }
const CMat& NormSpec::gram() const { return d_->gram; }
const CMat& NormSpec::gram_inverse() const { return d_->gram_inv; }
const RMat& NormSpec::facets() const { return d_->facets; }
const RMat& NormSpec::metric() const { return d_->metric; }
std::size_t NormSpec::basepoint() const { return d_->basepoint; }
bool NormSpec::penalize_basepoint() const { return d_->penalize; }
std::size_t NormSpec::num_points() const { return static_cast<std::size_t>(d_->metric.rows()); }
const std::vector<NormSpec>& NormSpec::blocks() const { return d_->blocks; }
const RhoCombiner& NormSpec::combiner() const { return d_->combiner; }
const std::vector<std::size_t>& NormSpec::block_offsets() const { return d_->offsets; }

// ---------------------------------------------------------------------------
// Evaluation

double dil(const RMat& metric, const CVec& f) {
  require(metric.rows() == f.size() && metric.cols() == f.size(), ErrorCode::DimensionMismatch,
          "dil: metric and function sizes differ");
  double best = 0.0;
  for (Eigen::Index x = 0; x < f.size(); ++x)
    for (Eigen::Index y = x + 1; y < f.size(); ++y) {
      const double dist = metric(x, y);
      require(dist > 0.0, ErrorCode::InvalidMetric,
              "zero distance between distinct points " + std::to_string(x) + " and " +
                  std::to_string(y));
      best = std::max(best, std::abs(f[x] - f[y]) / dist);
    }
  return best;
}

double norm_eval(const NormSpec& spec, const CVec& v) {
  check_dim(spec, v.size(), "norm_eval");
  require(v.allFinite(), ErrorCode::InvalidArgument, "norm_eval: non-finite entries");
  switch (spec.kind()) {
    case NormSpec::Kind::Lp: return lp_norm(v, spec.p());
    case NormSpec::Kind::HilbertGram:
      return std::sqrt(std::max(0.0, (v.adjoint() * spec.gram() * v)(0, 0).real()));
    case NormSpec::Kind::Polyhedral:
      return std::max(0.0, (spec.facets() * real_part_checked(v)).maxCoeff());
    case NormSpec::Kind::LipschitzFin: {
      const NormSpec::Data& d = spec.data();
      const CVec full = lipschitz_values(d, v);
      double val = dil(d.metric, full);
      if (d.penalize) val += std::abs(full[static_cast<Eigen::Index>(d.basepoint)]);
      return val;
    }
    case NormSpec::Kind::BlockSum: {
      const auto& blocks = spec.blocks();
      std::vector<double> r(blocks.size());
      for (std::size_t n = 0; n < blocks.size(); ++n)
        r[n] = norm_eval(blocks[n], v.segment(static_cast<Eigen::Index>(spec.block_offsets()[n]),
                                              static_cast<Eigen::Index>(blocks[n].dim())));
      return spec.combiner().combine(r);
    }
  }
  return 0.0;
}

double dual_norm_eval(const NormSpec& spec, const Functional& phi, double tol) {
  check_dim(spec, phi.coeffs.size(), "dual_norm_eval");
  const CVec& c = phi.coeffs;
  switch (spec.kind()) {
    case NormSpec::Kind::Lp: return lp_norm(c, conjugate_exponent(spec.p()));
    case NormSpec::Kind::HilbertGram:
      // sup |sum phi_i f_i| over f* G f <= 1 is sqrt(phi^T G^{-1} conj(phi)).
      return std::sqrt(
          std::max(0.0, (c.transpose() * spec.gram_inverse() * c.conjugate())(0, 0).real()));
    case NormSpec::Kind::Polyhedral: return polyhedral_dual(spec.facets(), c);
    case NormSpec::Kind::LipschitzFin: return lipschitz_dual(spec.data(), c, tol);
    case NormSpec::Kind::BlockSum: {
      const auto& blocks = spec.blocks();
      std::vector<double> s(blocks.size());
      for (std::size_t n = 0; n < blocks.size(); ++n)
        s[n] = dual_norm_eval(
            blocks[n],
            Functional{c.segment(static_cast<Eigen::Index>(spec.block_offsets()[n]),
                                 static_cast<Eigen::Index>(blocks[n].dim()))},
            tol);
      return spec.combiner().dual_combine(s);
    }
  }
  return 0.0;
}

SupportFace support_face(const NormSpec& spec, const CVec& e, double tol) {
  check_dim(spec, e.size(), "support_face");
  const double ne = norm_eval(spec, e);
  require(ne > 0.0, ErrorCode::ZeroVector, "support_face: e must be nonzero");
  SupportFace face;
  switch (spec.kind()) {
    case NormSpec::Kind::HilbertGram: {
      face.extreme.push_back({(spec.gram() * e).conjugate() / ne});
      face.unique = true;
      return face;
    }
    case NormSpec::Kind::Lp: {
      const double p = spec.p();
      const CVec ph = unit_phase(e).conjugate();
      const Eigen::Index d = e.size();
      if (std::isinf(p)) {
        for (Eigen::Index i = 0; i < d; ++i) {
          if (std::abs(e[i]) < ne * (1.0 - tol)) continue;
          CVec nu = CVec::Zero(d);
          nu[i] = ph[i];
          face.extreme.push_back({nu});
        }
      } else if (p == 1.0) {
        CVec base = CVec::Zero(d);
        std::vector<Eigen::Index> off;
        for (Eigen::Index i = 0; i < d; ++i) {
          if (std::abs(e[i]) > tol * ne)
            base[i] = ph[i];
          else
            off.push_back(i);
        }
        if (off.empty()) {
          face.extreme.push_back({base});
        } else {
          // Off-support coordinates range over the closed disk; sample phases.
          face.approximate = true;
          for (cplx z : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
            CVec nu = base;
            for (Eigen::Index i : off) nu[i] = z;
            face.extreme.push_back({nu});
          }
        }
      } else {
        CVec nu(d);
        for (Eigen::Index i = 0; i < d; ++i)
          nu[i] = ph[i] * std::pow(std::abs(e[i]) / ne, p - 1.0);
        face.extreme.push_back({nu});
      }
      face.unique = !face.approximate && face.extreme.size() == 1;
      return face;
    }
    case NormSpec::Kind::Polyhedral: {
      const RMat& A = spec.facets();
      for (Eigen::Index j : active_facets(A, real_part_checked(e), tol)) {
        const CVec nu = A.row(j).transpose().cast<cplx>();
        bool dup = false;
        for (const auto& f : face.extreme)
          dup = dup || (f.coeffs - nu).cwiseAbs().maxCoeff() <= 1e-12;
        if (!dup) face.extreme.push_back({nu});
      }
      face.unique = face.extreme.size() == 1;
      return face;
    }
    case NormSpec::Kind::LipschitzFin: return lipschitz_face(spec.data(), e, tol);
    case NormSpec::Kind::BlockSum: {
      const auto& blocks = spec.blocks();
      const auto& off = spec.block_offsets();
      const RhoCombiner& rho = spec.combiner();
      const std::size_t nb = blocks.size();
      std::vector<double> r(nb);
      std::vector<CVec> seg(nb);
      for (std::size_t n = 0; n < nb; ++n) {
        seg[n] = e.segment(static_cast<Eigen::Index>(off[n]),
                           static_cast<Eigen::Index>(blocks[n].dim()));
        r[n] = norm_eval(blocks[n], seg[n]);
      }
      // Outer norming weights beta with sum beta_n r_n = rho(r) and rho*(beta) = 1.
      std::vector<std::vector<double>> betas;
      if (std::isinf(rho.p)) {
        for (std::size_t n = 0; n < nb; ++n) {
          if (rho.weight(n) * r[n] < ne * (1.0 - tol)) continue;
          std::vector<double> b(nb, 0.0);
          b[n] = rho.weight(n);
          betas.push_back(b);
        }
      } else if (rho.p == 1.0) {
        std::vector<double> b(nb, 0.0);
        for (std::size_t n = 0; n < nb; ++n) {
          if (r[n] > tol * ne)
            b[n] = rho.weight(n);
          else
            face.approximate = true;
        }
        betas.push_back(b);
      } else {
        std::vector<double> b(nb, 0.0);
        for (std::size_t n = 0; n < nb; ++n)
          b[n] = rho.weight(n) * std::pow(r[n] / ne, rho.p - 1.0);
        betas.push_back(b);
      }
      constexpr std::size_t kCap = 256;
      for (const auto& beta : betas) {
        std::vector<CVec> partial = {CVec::Zero(e.size())};
        for (std::size_t n = 0; n < nb; ++n) {
          if (beta[n] == 0.0) continue;
          const SupportFace bf = support_face(blocks[n], seg[n], tol);
          face.approximate = face.approximate || bf.approximate;
          std::vector<CVec> next;
          for (const auto& acc : partial)
            for (const auto& nu : bf.extreme) {
              if (next.size() >= kCap) {
                face.approximate = true;
                break;
              }
              CVec v = acc;
              v.segment(static_cast<Eigen::Index>(off[n]),
                        static_cast<Eigen::Index>(blocks[n].dim())) = beta[n] * nu.coeffs;
              next.push_back(v);
            }
          partial = std::move(next);
        }
        for (auto& v : partial) face.extreme.push_back({v});
      }
      face.unique = !face.approximate && face.extreme.size() == 1;
      return face;
    }
  }
  return face;
}

std::size_t face_dimension(const NormSpec& spec, const CVec& e, double tol) {
  check_dim(spec, e.size(), "face_dimension");
  switch (spec.kind()) {
    case NormSpec::Kind::HilbertGram: {
      require(norm_eval(spec, e) > 0.0, ErrorCode::ZeroVector, "face_dimension: e must be nonzero");
      return 0;
    }
    case NormSpec::Kind::Lp: {
      const double ne = norm_eval(spec, e);
      require(ne > 0.0, ErrorCode::ZeroVector, "face_dimension: e must be nonzero");
      if (std::isinf(spec.p())) return support_face(spec, e, tol).extreme.size() - 1;
      if (spec.p() == 1.0) {
        std::size_t off = 0;
        for (Eigen::Index i = 0; i < e.size(); ++i) off += std::abs(e[i]) <= tol * ne ? 1 : 0;
        return 2 * off;
      }
      return 0;
    }
    case NormSpec::Kind::Polyhedral: {
      std::vector<CVec> pts;
      for (const auto& f : support_face(spec, e, tol).extreme) pts.push_back(f.coeffs);
      return affine_dimension(pts);
    }
    default:
      fail(ErrorCode::Unsupported,
           std::string("face_dimension is approximate-only for ") + to_string(spec.kind()) +
               "; sample norming functionals with support_face instead");
  }
}

std::size_t sphere_face_dimension(const NormSpec& spec, const CVec& e, double tol) {
  check_dim(spec, e.size(), "sphere_face_dimension");
  const double ne = norm_eval(spec, e);
  require(std::abs(ne - 1.0) <= std::max(tol, 1e-12), ErrorCode::OffSphere,
          "sphere_face_dimension: ||e|| = " + std::to_string(ne) + " is not 1");
  return unit_sphere_face_dim(spec, e / ne, tol);
}

void validate_metric(const RMat& metric) { validate_metric_impl(metric); }

std::optional<CMat> hilbert_gram_equivalent(const NormSpec& spec) {
  switch (spec.kind()) {
    case NormSpec::Kind::HilbertGram: return spec.gram();
    case NormSpec::Kind::Lp:
      if (spec.p() == 2.0 || spec.dim() == 1) {
        const auto d = static_cast<Eigen::Index>(spec.dim());
        return CMat::Identity(d, d);
      }
      return std::nullopt;
    case NormSpec::Kind::BlockSum: {
      if (spec.combiner().p != 2.0) return std::nullopt;
      const auto d = static_cast<Eigen::Index>(spec.dim());
      CMat G = CMat::Zero(d, d);
      for (std::size_t n = 0; n < spec.blocks().size(); ++n) {
        auto g = hilbert_gram_equivalent(spec.blocks()[n]);
        if (!g) return std::nullopt;
        const auto o = static_cast<Eigen::Index>(spec.block_offsets()[n]);
        G.block(o, o, g->rows(), g->cols()) = spec.combiner().weight(n) * *g;
      }
      return G;
    }
    default: return std::nullopt;
  }
}

std::size_t affine_dimension(const std::vector<CVec>& points, double tol) {
  if (points.size() <= 1) return 0;
  const Eigen::Index d = points.front().size();
  RMat D(2 * d, static_cast<Eigen::Index>(points.size() - 1));
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const CVec diff = points[i] - points[0];
    D.col(static_cast<Eigen::Index>(i - 1)) << diff.real(), diff.imag();
  }
  if (scale == 0.0) return 0;
  Eigen::JacobiSVD<RMat> svd(D);
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    rank += svd.singularValues()[i] > tol * scale ? 1 : 0;
  return rank;
}

}  // namespace nscf
