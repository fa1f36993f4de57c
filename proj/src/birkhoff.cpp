#include "nscf/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nscf/error.hpp"

namespace nscf {

double NormView::norm(const CVec& v) const {
  return dual ? dual_norm_eval(spec, Functional{v}, tol) : norm_eval(spec, v);
}

const char* to_string(Orthogonality o) {
  switch (o) {
    case Orthogonality::Orthogonal: return "orthogonal";
    case Orthogonality::Indeterminate: return "indeterminate";
    case Orthogonality::NotOrthogonal: return "not_orthogonal";
  }
  return "?";
}

namespace {

constexpr double kGolden = 0.6180339887498949;

struct Min1 {
  double x;
  double v;
};

// Golden-section search for a convex function on [lo, hi].
template <class F>
Min1 golden_min(F&& h, double lo, double hi, double xtol, int& evals) {
  double a = lo, b = hi;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = h(c), fd = h(d);
  evals += 2;
  for (int it = 0; it < 400 && b - a > xtol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = h(d);
    }
    ++evals;
  }
  return fc <= fd ? Min1{c, fc} : Min1{d, fd};
}

// v = phase * r with r real, when possible.
bool real_direction(const CVec& v, cplx& phase) {
  Eigen::Index k = 0;
  const double mx = v.cwiseAbs().maxCoeff(&k);
  if (mx == 0.0) return false;
  phase = v[k] / mx;
  const CVec r = v / phase;
  return r.imag().cwiseAbs().maxCoeff() <= 1e-14 * mx;
}

void check_pair(std::size_t dim, const CVec& e, const CVec& f, const char* what) {
  if (static_cast<std::size_t>(e.size()) != dim || static_cast<std::size_t>(f.size()) != dim)
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": expected vectors of dimension " +
                                           std::to_string(dim));
}

// Distance from the origin to the convex hull of points in the plane.
double hull_distance(const std::vector<cplx>& z) {
  const std::size_t n = z.size();
  if (n == 0) return 0.0;
  auto seg = [](cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(a);
    const double s = std::clamp(-(std::conj(ab) * a).real() / len2, 0.0, 1.0);
    return std::abs(a + s * ab);
  };
  auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double s1 = cross(z[j] - z[i], -z[i]);
        const double s2 = cross(z[k] - z[j], -z[j]);
        const double s3 = cross(z[i] - z[k], -z[k]);
        if ((s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0)) return 0.0;
      }
  double best = std::abs(z[0]);
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, std::abs(z[i]));
    for (std::size_t j = i + 1; j < n; ++j) best = std::min(best, seg(z[i], z[j]));
  }
  return best;
}

}  // namespace

LineMinResult min_norm_over_line(const NormView& view, const CVec& e, const CVec& f,
                                 double tol) {
  check_pair(view.dim(), e, f, "min_norm_over_line");
  const double nf = view.norm(f);
  require(nf > 0.0, ErrorCode::ZeroVector, "min_norm_over_line: f must be nonzero");
  const double ne = view.norm(e);
  LineMinResult res;
  res.value = ne;
  res.iterations = 2;
  if (ne == 0.0) {
    res.certified = true;
    return res;
  }
  // Outside |t| <= R the norm exceeds ||e||, so the minimizer lies inside.
  const double R = 2.0 * ne / nf;
  const double xtol = std::max(tol * ne / nf, 1e-15 * R);
  int evals = 0;
  auto h = [&](cplx t) { return view.norm(e + t * f); };

  cplx pe{1.0, 0.0}, pf{1.0, 0.0};
  const bool real_t = view.real_scalars() ||
                      (view.conjugation_symmetric() && real_direction(e, pe) &&
                       real_direction(f, pf));
  cplx best_t{0.0, 0.0};
  double best = ne;
  double width = 0.0;
  if (real_t) {
    // For conjugation-symmetric norms and real e, f the minimum over complex
    // s of ||e + s f|| is attained at real s.
    const cplx scale = view.real_scalars() ? cplx(1.0, 0.0) : pf / pe;
    const double Rs = R * std::abs(scale);
    const double xs = xtol * std::abs(scale);
    const Min1 m = golden_min([&](double s) { return h(cplx(s, 0.0) / scale); }, -Rs, Rs,
                              xs, evals);
    if (m.v < best) {
      best = m.v;
      best_t = cplx(m.x, 0.0) / scale;
    }
    width = xtol;
  } else {
    auto inner = [&](double a, int& ev) {
      return golden_min([&](double b) { return h(cplx(a, b)); }, -R, R, xtol, ev);
    };
    double im_at = 0.0;
    const Min1 outer = golden_min(
        [&](double a) {
          const Min1 in = inner(a, evals);
          return in.v;
        },
        -R, R, xtol, evals);
    {
      const Min1 in = inner(outer.x, evals);
      im_at = in.x;
      if (in.v < best) {
        best = in.v;
        best_t = cplx(outer.x, im_at);
      }
    }
    // Coordinate-descent polish.
    cplx cur = best_t;
    for (int round = 0; round < 3; ++round) {
      const Min1 re = golden_min([&](double a) { return h(cplx(a, cur.imag())); }, -R, R,
                                 xtol, evals);
      if (re.v < best) {
        best = re.v;
        cur = cplx(re.x, cur.imag());
        best_t = cur;
      }
      const Min1 im = golden_min([&](double b) { return h(cplx(cur.real(), b)); }, -R, R,
                                 xtol, evals);
      if (im.v < best) {
        best = im.v;
        cur = cplx(cur.real(), im.x);
        best_t = cur;
      }
    }
    width = xtol;
  }
  res.t_star = best_t;
  res.value = best;
  res.iterations += evals;
  res.certified = width * nf <= tol * ne * (1.0 + 1e-12);
  return res;
}

LineMinResult min_norm_over_line(const NormSpec& spec, const CVec& e, const CVec& f,
                                 double tol) {
  return min_norm_over_line(NormView::primal(spec), e, f, tol);
}

OrthoDecision classify_orthogonality(const NormView& view, const CVec& e, const CVec& f,
                                     double tol) {
  check_pair(view.dim(), e, f, "classify_orthogonality");
  OrthoDecision d;
  d.norm_e = view.norm(e);
  require(d.norm_e > 0.0, ErrorCode::ZeroVector, "classify_orthogonality: e must be nonzero");
  d.line = min_norm_over_line(view, e, f, 1e-2 * tol);
  d.margin = std::min(0.0, d.line.value / d.norm_e - 1.0);
  if (d.margin >= -tol)
    d.verdict = Orthogonality::Orthogonal;
  else if (d.margin >= -10.0 * tol)
    d.verdict = Orthogonality::Indeterminate;
  else
    d.verdict = Orthogonality::NotOrthogonal;
  return d;
}

bool is_birkhoff_orthogonal(const NormView& view, const CVec& e, const CVec& f, double tol) {
  return classify_orthogonality(view, e, f, tol).verdict == Orthogonality::Orthogonal;
}

bool is_birkhoff_orthogonal(const NormSpec& spec, const CVec& e, const CVec& f, double tol) {
  return is_birkhoff_orthogonal(NormView::primal(spec), e, f, tol);
}

DualOrthoResult birkhoff_dual_test(const NormSpec& spec, const CVec& e, const CVec& f,
                                   double tol) {
  check_pair(spec.dim(), e, f, "birkhoff_dual_test");
  const double ne = norm_eval(spec, e);
  const double nf = norm_eval(spec, f);
  require(ne > 0.0 && nf > 0.0, ErrorCode::ZeroVector,
          "birkhoff_dual_test: e and f must be nonzero");
  DualOrthoResult r;
  switch (spec.kind()) {
    case NormSpec::Kind::HilbertGram: {
      const cplx ip = (e.adjoint() * spec.gram() * f)(0, 0);
      r.slack = std::abs(ip) / (ne * nf);
      break;
    }
    case NormSpec::Kind::Lp: {
      const double p = spec.p();
      if (p == 1.0) {
        // Off-support coordinates of a norming functional range over the disk.
        cplx c{0.0, 0.0};
        double rad = 0.0;
        for (Eigen::Index i = 0; i < e.size(); ++i) {
          if (std::abs(e[i]) > 1e-9 * ne)
            c += f[i] * std::conj(e[i]) / std::abs(e[i]);
          else
            rad += std::abs(f[i]);
        }
        r.slack = std::max(0.0, std::abs(c) - rad) / nf;
        break;
      }
      [[fallthrough]];
    }
    case NormSpec::Kind::Polyhedral: {
      const SupportFace face = support_face(spec, e, 1e-9);
      std::vector<cplx> z;
      for (const auto& nu : face.extreme) z.push_back(nu.apply(f));
      r.slack = hull_distance(z) / nf;
      break;
    }
    default:
      fail(ErrorCode::Unsupported, std::string("birkhoff_dual_test: no exact norming set for ") +
                                       to_string(spec.kind()));
  }
  r.orthogonal = r.slack <= tol;
  return r;
}

bool is_birkhoff_orthogonal_dual(const NormSpec& spec, const CVec& e, const CVec& f,
                                 double tol) {
  return birkhoff_dual_test(spec, e, f, tol).orthogonal;
}

IsoortReport lemma_isoort_check(const NormSpec& spec, const CMat& T, const CVec& e,
                                const CVec& f, double tol) {
  check_pair(spec.dim(), e, f, "lemma_isoort_check");
  require(T.rows() == e.size() && T.cols() == e.size(), ErrorCode::DimensionMismatch,
          "lemma_isoort_check: operator must be square of the space dimension");
  require(e.norm() > 0.0 && f.norm() > 0.0, ErrorCode::ZeroVector,
          "lemma_isoort_check: e and f must be nonzero");
  IsoortReport rep;
  const double tnorm = std::max(1.0, T.norm());
  auto eigenvalue = [&](const CVec& v, const char* name) {
    const CVec Tv = T * v;
    const cplx lam = v.dot(Tv) / v.squaredNorm();
    if ((Tv - lam * v).norm() > tol * tnorm * v.norm())
      fail(ErrorCode::NotEigenvector,
           std::string("lemma_isoort_check: ") + name + " is not an eigenvector of T");
    return lam;
  };
  rep.alpha = eigenvalue(e, "e");
  rep.beta = eigenvalue(f, "f");
  if (std::abs(rep.alpha - rep.beta) <= tol)
    fail(ErrorCode::VacuousLemma, "lemma_isoort_check: eigenvalues coincide");

  std::mt19937_64 rng(0x15007);
  std::normal_distribution<double> g;
  std::vector<CVec> probes = {e, f};
  for (int s = 0; s < 32; ++s) {
    CVec v(e.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      v[i] = spec.real_scalars() ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
    probes.push_back(v);
  }
  double dev = 0.0;
  for (const auto& v : probes) {
    const double nv = norm_eval(spec, v);
    if (nv > 0.0) dev = std::max(dev, std::abs(norm_eval(spec, T * v) / nv - 1.0));
  }
  rep.isometry_deviation = dev;
  rep.is_isometry_on_samples = dev <= tol;
  rep.unimodular = std::abs(std::abs(rep.alpha) - 1.0) <= tol &&
                   std::abs(std::abs(rep.beta) - 1.0) <= tol;

  const NormView view = NormView::primal(spec);
  const OrthoDecision ef = classify_orthogonality(view, e, f, tol);
  const OrthoDecision fe = classify_orthogonality(view, f, e, tol);
  rep.margin_ef = ef.margin;
  rep.margin_fe = fe.margin;
  rep.e_orth_f = ef.verdict == Orthogonality::Orthogonal;
  rep.f_orth_e = fe.verdict == Orthogonality::Orthogonal;
  return rep;
}

}  // namespace nscf
