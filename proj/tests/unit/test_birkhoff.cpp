#include <limits>

#include "doctest.h"
#include "nscf/birkhoff.hpp"
#include "nscf/error.hpp"
#include "unit/oracles.hpp"

using namespace nscf;
using doctest::Approx;

namespace {

const double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-7;

CVec cv(std::initializer_list<cplx> xs) {
  CVec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) v[i++] = x;
  return v;
}

// Birkhoff margin in a Hilbert space: min_t ||e + t f||^2 = ||e||^2 - |e*Gf|^2 / ||f||^2.
double hilbert_margin(const CMat& G, const CVec& e, const CVec& f) {
  const double ee = (e.adjoint() * G * e)(0, 0).real();
  const double ff = (f.adjoint() * G * f)(0, 0).real();
  const double ip = std::abs((e.adjoint() * G * f)(0, 0));
  return std::sqrt(std::max(0.0, ee - ip * ip / ff)) / std::sqrt(ee) - 1.0;
}

bool in_band(double margin) { return margin >= -10 * kTol && margin < -kTol / 10; }

CMat inv_sqrt(const CMat& G) {
  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("line minimization examples") {
  const auto l2 = NormSpec::lp(2.0, 2);
  const CVec e = cv({1.0, 0.0}), f = cv({1.0, 1.0});
  double arg = 0.0;
  const double grid = oracle::grid_min(
      [&](double t) { return oracle::lp_norm(e + t * f, 2.0); }, -2.0, 2.0, 1000000, &arg);
  CHECK(grid == Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(arg == Approx(-0.5).epsilon(1e-5));
  auto r = min_norm_over_line(l2, e, f);
  CHECK(r.value == Approx(grid).epsilon(1e-9));
  CHECK(std::abs(r.t_star - cplx(-0.5, 0.0)) < 1e-6);
  CHECK(r.certified);

  const CVec g = cv({cplx(0.3, 1.0), -2.0});
  r = min_norm_over_line(l2, g, g);
  CHECK(r.value < 1e-8);
  CHECK(std::abs(r.t_star + 1.0) < 1e-6);

  const auto linf = NormSpec::lp(kInf, 2);
  const CVec e2 = cv({0.0, 1.0});
  const double g2 = oracle::grid_min(
      [&](double t) { return oracle::lp_norm(e2 + t * f, kInf); }, -2.0, 2.0, 400000, &arg);
  CHECK(g2 == Approx(0.5).epsilon(1e-9));
  r = min_norm_over_line(linf, e2, f);
  CHECK(r.value == Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(r.t_star - cplx(arg, 0.0)) < 1e-5);
  CHECK_THROWS_AS(min_norm_over_line(l2, e, cv({0.0, 0.0})), Error);
}

TEST_CASE("orthogonality examples and asymmetry") {
  const auto h = NormSpec::hilbert(CMat::Identity(2, 2));
  CHECK(is_birkhoff_orthogonal(h, cv({1.0, 0.0}), cv({0.0, 1.0})));
  CHECK(is_birkhoff_orthogonal_dual(h, cv({1.0, 0.0}), cv({0.0, 1.0})));

  for (const auto& linf : {NormSpec::lp(kInf, 2), NormSpec::polyhedral(oracle::linf_facets(2))}) {
    CAPTURE(to_string(linf.kind()));
    const auto ef = classify_orthogonality(NormView::primal(linf), cv({1.0, 1.0}), cv({0.0, 1.0}));
    const auto fe = classify_orthogonality(NormView::primal(linf), cv({0.0, 1.0}), cv({1.0, 1.0}));
    CHECK(ef.verdict == Orthogonality::Orthogonal);
    CHECK(fe.verdict == Orthogonality::NotOrthogonal);
    CHECK(fe.margin == Approx(-0.5).epsilon(1e-8));
  }
  const auto poly = NormSpec::polyhedral(oracle::linf_facets(2));
  CHECK(is_birkhoff_orthogonal_dual(poly, cv({1.0, 1.0}), cv({0.0, 1.0})));
  CHECK_FALSE(is_birkhoff_orthogonal_dual(poly, cv({1.0, 0.0}), cv({1.0, 1.0})));
  CHECK_THROWS_AS(is_birkhoff_orthogonal(h, cv({0.0, 0.0}), cv({0.0, 1.0})), Error);
  CHECK_THROWS_AS(
      is_birkhoff_orthogonal_dual(NormSpec::lipschitz(RMat::Ones(2, 2) - RMat::Identity(2, 2),
                                                      0, true),
                                  cv({0.0, 1.0}), cv({1.0, 0.0})),
      Error);
}

TEST_CASE("dual view orthogonality") {
  // Dual of l1 is l-infinity, so the asymmetric pair reappears.
  const auto v = NormView::dual_of(NormSpec::lp(1.0, 2));
  CHECK(v.norm(cv({1.0, -2.0})) == Approx(2.0));
  CHECK(is_birkhoff_orthogonal(v, cv({1.0, 1.0}), cv({0.0, 1.0})));
  CHECK_FALSE(is_birkhoff_orthogonal(v, cv({0.0, 1.0}), cv({1.0, 1.0})));
}

TEST_CASE("Hilbert oracle equivalence") {
  oracle::Gen g(21);
  int decided = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = g.integer(2, 8);
    const CMat G = g.hpd(n);
    const auto s = NormSpec::hilbert(G);
    const CVec e = g.cvec(n);
    CVec f = g.cvec(n);
    if (trial % 2 == 0) {
      const cplx ip = (e.adjoint() * G * f)(0, 0);
      f -= e * (ip / (e.adjoint() * G * e)(0, 0).real());
    }
    const double m = hilbert_margin(G, e, f);
    if (in_band(m)) continue;
    const bool expect = std::abs((e.adjoint() * G * f)(0, 0)) <= 1e-9 * e.norm() * f.norm();
    CHECK(is_birkhoff_orthogonal(s, e, f, kTol) == expect);
    ++decided;
  }
  CHECK(decided >= 190);
}

TEST_CASE("primal and dual characterizations agree") {
  oracle::Gen g(22);
  std::vector<NormSpec> specs = {NormSpec::hilbert(g.hpd(3)), NormSpec::lp(2.0, 3),
                                 NormSpec::polyhedral(oracle::linf_facets(3)),
                                 NormSpec::polyhedral(oracle::l1_facets(3)),
                                 NormSpec::lp(kInf, 3), NormSpec::lp(1.0, 3)};
  for (const auto& s : specs) {
    CAPTURE(to_string(s.kind()));
    int agree = 0, orth = 0;
    for (int k = 0; k < 100; ++k) {
      const bool real = s.real_scalars() || k % 3 == 0;
      CVec e = real ? g.rvec_c(3) : g.cvec(3);
      if (k % 5 == 1) e[g.integer(0, 2)] = 0.0;
      if (k % 7 == 2) e[1] = e[0];
      CVec f = real ? g.rvec_c(3) : g.cvec(3);
      if (k % 2 == 0) {
        // Kill one norming functional: f <- f - (<f,nu>/<w,nu>) w for a w with <w,nu> != 0.
        const auto face = support_face(s, e);
        const CVec nu = face.extreme[static_cast<std::size_t>(g.integer(
                                         0, static_cast<int>(face.extreme.size()) - 1))]
                            .coeffs;
        const CVec w = nu.conjugate();
        f -= w * ((nu.array() * f.array()).sum() / (nu.array() * w.array()).sum());
      }
      if (f.norm() < 1e-6) continue;
      const auto primal = classify_orthogonality(NormView::primal(s), e, f, kTol);
      const auto dual = birkhoff_dual_test(s, e, f, kTol);
      if (in_band(primal.margin) || (dual.slack >= kTol / 10 && dual.slack <= 10 * std::sqrt(kTol)))
        continue;
      CHECK((primal.verdict == Orthogonality::Orthogonal) == dual.orthogonal);
      ++agree;
      orth += dual.orthogonal;
    }
    CHECK(agree >= 90);
    CHECK(orth >= 40);
  }
}

TEST_CASE("verdicts are invariant under scaling") {
  oracle::Gen g(23);
  const auto s = NormSpec::lp(3.0, 3);
  for (int k = 0; k < 20; ++k) {
    const CVec e = g.cvec(3);
    CVec f = g.cvec(3);
    if (k % 2 == 0) {
      const auto nu = support_face(s, e).extreme[0].coeffs;
      f -= nu.conjugate() * ((nu.array() * f.array()).sum() / nu.squaredNorm());
    }
    const bool base = is_birkhoff_orthogonal(s, e, f);
    const cplx lam = g.cnormal() * 3.0, mu = g.cnormal() * 0.2;
    CHECK(is_birkhoff_orthogonal(s, lam * e, mu * f) == base);
  }
}

TEST_CASE("line minimum never exceeds the norm at t = 0") {
  oracle::Gen g(24);
  for (const auto& s : {NormSpec::lp(1.0, 3), NormSpec::lp(kInf, 3), NormSpec::hilbert(g.hpd(3))}) {
    for (int k = 0; k < 30; ++k) {
      const CVec e = g.cvec(3), f = g.cvec(3);
      const auto r = min_norm_over_line(s, e, f, 1e-9);
      CHECK(r.value <= norm_eval(s, e) + 1e-9);
      CHECK(r.value == Approx(norm_eval(s, e + r.t_star * f)).epsilon(1e-12));
    }
  }
}

TEST_CASE("line minimization matches a disk grid on complex sup and l1 norms") {
  oracle::Gen g(25);
  for (const double p : {1.0, kInf, 4.0}) {
    const auto s = NormSpec::lp(p, 3);
    for (int k = 0; k < 8; ++k) {
      const CVec e = g.cvec(3), f = g.cvec(3);
      const double R = 2 * oracle::lp_norm(e, p) / oracle::lp_norm(f, p);
      const double grid = oracle::disk_grid_min(
          [&](cplx t) { return oracle::lp_norm(e + t * f, p); }, R, 200, 256);
      const auto r = min_norm_over_line(s, e, f, 1e-10);
      CHECK(r.value <= grid + 1e-9);
      CHECK(r.value >= grid - 1e-3 * oracle::lp_norm(e, p));
    }
  }
}

TEST_CASE("isometry eigenvector lemma examples") {
  const auto h = NormSpec::hilbert(CMat::Identity(2, 2));
  CMat T = CMat::Zero(2, 2);
  T(0, 0) = 1.0;
  T(1, 1) = -1.0;
  auto r = lemma_isoort_check(h, T, cv({1.0, 0.0}), cv({0.0, 1.0}));
  CHECK(r.passed());
  CHECK(r.is_isometry_on_samples);
  CHECK(r.unimodular);

  T(1, 1) = cplx(0, 1);
  r = lemma_isoort_check(NormSpec::lp(1.0, 2), T, cv({1.0, 0.0}), cv({0.0, 1.0}));
  CHECK(r.passed());
  CHECK(r.is_isometry_on_samples);

  // Signed cyclic permutation on l-infinity: T e_0 = e_1, T e_1 = -e_2, T e_2 = e_0.
  CMat P = CMat::Zero(3, 3);
  P(1, 0) = 1.0;
  P(2, 1) = -1.0;
  P(0, 2) = 1.0;
  Eigen::ComplexEigenSolver<CMat> es(P);
  const auto linf = NormSpec::lp(kInf, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      r = lemma_isoort_check(linf, P, es.eigenvectors().col(a), es.eigenvectors().col(b));
      CHECK(r.is_isometry_on_samples);
      CHECK(r.passed());
    }

  CHECK_THROWS_AS(lemma_isoort_check(h, CMat::Identity(2, 2), cv({1.0, 0.0}), cv({0.0, 1.0})),
                  Error);
  CMat J = CMat::Zero(2, 2);
  J(0, 1) = 1.0;
  J(1, 0) = 1.0;
  CHECK_THROWS_AS(lemma_isoort_check(h, J, cv({1.0, 0.0}), cv({0.0, 1.0})), Error);
}

TEST_CASE("isometry eigenvector lemma on random isometries") {
  oracle::Gen g(26);
  for (int k = 0; k < 50; ++k) {
    const int n = g.integer(2, 6);
    const CMat G = g.hpd(n);
    const CMat S = inv_sqrt(G);
    const CMat Q = g.unitary(n);
    Eigen::VectorXcd d(n);
    for (int i = 0; i < n; ++i) d[i] = std::polar(1.0, 2 * M_PI * (i + g.uniform(0.1, 0.9)) / n);
    const CMat T = S * Q * d.asDiagonal() * Q.adjoint() * S.inverse();
    const auto r = lemma_isoort_check(NormSpec::hilbert(G), T, S * Q.col(0), S * Q.col(1));
    CHECK(r.is_isometry_on_samples);
    CHECK(r.unimodular);
    CHECK(r.passed());
  }
  const double ps[] = {1.0, 1.5, 3.0, kInf};
  for (int k = 0; k < 50; ++k) {
    const int n = g.integer(2, 4);
    const double p = ps[k % 4];
    const auto perm = g.permutation(n);
    CMat T = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) T(perm[i], i) = g.unimodular();
    Eigen::ComplexEigenSolver<CMat> es(T);
    int a = -1, b = -1;
    for (int i = 0; i < n && a < 0; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(es.eigenvalues()[i] - es.eigenvalues()[j]) > 1e-3) {
          a = i;
          b = j;
          break;
        }
    if (a < 0) continue;
    CAPTURE(p);
    const auto r = lemma_isoort_check(NormSpec::lp(p, n), T, es.eigenvectors().col(a),
                                      es.eigenvectors().col(b));
    CHECK(r.is_isometry_on_samples);
    CHECK(r.passed());
  }
}
