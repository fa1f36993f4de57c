// Independent reference computations and random generators for the tests.
// Nothing here calls into the library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  double normal() { return std::normal_distribution<double>()(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  cplx cnormal() { return {normal(), normal()}; }
  cplx unimodular() { return std::polar(1.0, uniform(0.0, 2.0 * M_PI)); }

  CVec cvec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cnormal();
    return v;
  }
  CVec rvec_c(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  CMat cmat(int r, int c) {
    CMat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = cnormal();
    return m;
  }
  // Hermitian positive definite with moderate condition number.
  CMat hpd(int n) {
    const CMat a = cmat(n, n);
    return a.adjoint() * a + 0.5 * CMat::Identity(n, n);
  }
  CMat unitary(int n) {
    Eigen::HouseholderQR<CMat> qr(cmat(n, n));
    CMat q = qr.householderQ();
    return q;
  }
  // Random points in the plane, Euclidean metric.
  RMat planar_metric(int m, double scale = 1.0) {
    std::vector<cplx> p(m);
    for (auto& z : p) z = {uniform(-scale, scale), uniform(-scale, scale)};
    RMat d(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d(i, j) = std::abs(p[i] - p[j]);
    return d;
  }
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
  }
};

inline double lp_norm(const CVec& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
  return std::pow(s, 1.0 / p);
}

// Rank by full-pivot LU, a different factorization from the library's SVD.
inline int rank_lu(const RMat& m, double tol = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<RMat> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

inline int affine_dim(const std::vector<RVec>& pts, double tol = 1e-9) {
  if (pts.size() <= 1) return 0;
  RMat d(pts[0].size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t i = 1; i < pts.size(); ++i)
    d.col(static_cast<Eigen::Index>(i - 1)) = pts[i] - pts[0];
  return rank_lu(d, tol);
}

// Norm ball {x : A x <= 1}: brute-force vertex enumeration by choosing d
// facets, solving, and keeping feasible solutions.
inline std::vector<RVec> polytope_vertices(const RMat& A) {
  const int m = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
  std::vector<RVec> out;
  std::vector<int> idx(d);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == d) {
      RMat S(d, d);
      for (int i = 0; i < d; ++i) S.row(i) = A.row(idx[i]);
      Eigen::FullPivLU<RMat> lu(S);
      if (lu.rank() < d) return;
      const RVec x = lu.solve(RVec::Ones(d));
      if (((A * x).array() > 1.0 + 1e-9).any()) return;
      for (const auto& y : out)
        if ((y - x).cwiseAbs().maxCoeff() < 1e-9) return;
      out.push_back(x);
      return;
    }
    for (int j = start; j < m; ++j) {
      idx[depth] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

// Largest convex subset of the sphere of {A x <= 1} through boundary point x:
// the biggest facet-face {A_j v = 1} containing x, measured on enumerated vertices.
inline int polytope_face_dim(const RMat& A, const RVec& x, double tol = 1e-9) {
  const auto verts = polytope_vertices(A);
  int best = 0;
  for (int j = 0; j < A.rows(); ++j) {
    if (A.row(j).dot(x) < 1.0 - tol) continue;
    std::vector<RVec> on_face;
    for (const auto& v : verts)
      if (A.row(j).dot(v) >= 1.0 - 1e-9) on_face.push_back(v);
    best = std::max(best, affine_dim(on_face));
  }
  return best;
}

// Norming set dimension for ||x|| = max_j a_j.x: the a_j attaining the max.
inline int polyhedral_norming_dim(const RMat& A, const RVec& e, double tol = 1e-9) {
  const RVec s = A * e;
  const double mx = s.maxCoeff();
  std::vector<RVec> pts;
  for (int j = 0; j < A.rows(); ++j)
    if (s[j] >= mx * (1.0 - tol)) pts.push_back(A.row(j).transpose());
  return affine_dim(pts);
}

// Facets of the real l-infinity and l1 unit balls in R^d.
inline RMat linf_facets(int d) {
  RMat A(2 * d, d);
  A.setZero();
  for (int i = 0; i < d; ++i) {
    A(2 * i, i) = 1.0;
    A(2 * i + 1, i) = -1.0;
  }
  return A;
}
inline RMat l1_facets(int d) {
  RMat A(1 << d, d);
  for (int s = 0; s < (1 << d); ++s)
    for (int i = 0; i < d; ++i) A(s, i) = (s >> i) & 1 ? -1.0 : 1.0;
  return A;
}

// Minimum of a function over a uniform grid on [lo, hi].
template <class F>
double grid_min(F&& h, double lo, double hi, int n, double* argmin = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const double v = h(t);
    if (v < best) {
      best = v;
      if (argmin) *argmin = t;
    }
  }
  return best;
}

// Minimum over a polar grid of the disk |t| <= R, refined once around the best.
template <class F>
double disk_grid_min(F&& h, double R, int nr, int na) {
  double best = h(cplx(0.0, 0.0));
  cplx arg{0.0, 0.0};
  for (int i = 1; i <= nr; ++i)
    for (int k = 0; k < na; ++k) {
      const cplx t = std::polar(R * i / nr, 2.0 * M_PI * k / na);
      const double v = h(t);
      if (v < best) {
        best = v;
        arg = t;
      }
    }
  const double w = 2.0 * R / nr;
  for (int i = -40; i <= 40; ++i)
    for (int k = -40; k <= 40; ++k) {
      const cplx t = arg + cplx(w * i / 40.0, w * k / 40.0);
      best = std::min(best, h(t));
    }
  return best;
}

}  // namespace oracle
