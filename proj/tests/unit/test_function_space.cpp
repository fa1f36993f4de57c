#include <limits>

#include "doctest.h"
#include "nscf/error.hpp"
#include "nscf/function_space.hpp"
#include "unit/oracles.hpp"

using namespace nscf;
using doctest::Approx;

namespace {

std::vector<PhasePoint> pts(std::initializer_list<const char*> ids) {
  std::vector<PhasePoint> out;
  for (auto id : ids) out.push_back({id, std::nullopt});
  return out;
}

// e_n(z) = z (z/|z|)^n / 2^|n| written out directly.
cplx e_n(int n, cplx z) {
  const cplx w = z / std::abs(z);
  cplx p = 1.0;
  for (int i = 0; i < std::abs(n); ++i) p *= n > 0 ? w : std::conj(w);
  return z * p / std::pow(2.0, std::abs(n));
}

}  // namespace

TEST_CASE("point evaluation examples") {
  const FunctionSpaceModel delta(PhaseSpace::bare(pts({"1", "2", "3"})), CMat::Identity(3, 3),
                                 NormSpec::lp(2.0, 3));
  const auto ev = point_evaluation(delta, "2").coeffs;
  CHECK((ev - Eigen::Vector3cd(0, 1, 0)).norm() == 0.0);

  CMat B(3, 2);
  B << 1, 0, 1, 1, 1, 2;  // columns 1 and z at z = 0, 1, 2
  const FunctionSpaceModel poly(PhaseSpace::bare(pts({"0", "1", "2"})), B, NormSpec::lp(2.0, 2));
  CHECK((point_evaluation(poly, "2").coeffs - Eigen::Vector2cd(1, 2)).norm() == 0.0);
  CHECK_THROWS_AS(point_evaluation(poly, "7"), Error);

  const auto rk = rkhs_from_kernel({cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0)},
                                   KernelChoice::unilateral(2));
  const auto r = point_evaluation(rk, "z0").coeffs;
  for (int n = 0; n <= 2; ++n) CHECK(std::abs(r[n] - e_n(n, 1.0)) < 1e-15);
  CHECK(std::abs(r[2] - 0.25) < 1e-15);
}

TEST_CASE("independence checks") {
  const FunctionSpaceModel id2(PhaseSpace::bare(pts({"a", "b"})), CMat::Identity(2, 2),
                               NormSpec::lp(2.0, 2));
  CHECK(is_1_independent(id2).independent);
  CHECK(is_2_independent(id2).independent);

  CMat Z(3, 2);
  Z << 1, 0, 0, 0, 0, 1;
  const FunctionSpaceModel zr(PhaseSpace::bare(pts({"a", "b", "c"})), Z, NormSpec::lp(2.0, 2));
  const auto r1 = is_1_independent(zr);
  CHECK_FALSE(r1.independent);
  REQUIRE(r1.violating.size() == 1);
  CHECK(r1.violating[0] == 1);

  CMat D(3, 2);
  D << 1, 2, 0, 1, 1, 2;
  const FunctionSpaceModel dup(PhaseSpace::bare(pts({"a", "b", "c"})), D, NormSpec::lp(2.0, 2));
  const auto r2 = is_2_independent(dup);
  CHECK_FALSE(r2.independent);
  CHECK(r2.violating == std::make_pair(std::size_t{0}, std::size_t{2}));

  CMat V(3, 2);
  V << 1, 0, 1, 1, 1, 2;
  const FunctionSpaceModel vm(PhaseSpace::bare(pts({"a", "b", "c"})), V, NormSpec::lp(2.0, 2));
  CHECK(is_2_independent(vm).independent);

  RMat d(3, 3);
  d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
  const auto pinned = lipschitz_space(d, 0, false);
  const auto r3 = is_1_independent(pinned);
  CHECK_FALSE(r3.independent);
  REQUIRE(r3.violating.size() == 1);
  CHECK(r3.violating[0] == 0);
  CHECK(is_1_independent(lipschitz_space(d, 0, true)).independent);

  CHECK_THROWS_AS(FunctionSpaceModel(PhaseSpace::bare(pts({"a", "b"})), CMat::Ones(2, 2),
                                     NormSpec::lp(2.0, 2)),
                  Error);
  CHECK_THROWS_AS(PhaseSpace::bare(pts({"a", "a"})), Error);
}

TEST_CASE("kernel bases") {
  CHECK(std::abs(kernel_partial_sum(1.0, 1.0, KernelChoice::unilateral(50)) - 4.0 / 3.0) < 1e-12);
  double geometric = 0.0;
  for (int n = 0; n <= 50; ++n) geometric += std::pow(0.25, n);
  CHECK(std::abs(kernel_partial_sum(1.0, 1.0, KernelChoice::unilateral(50)) - geometric) < 1e-15);

  const auto bi = rkhs_from_kernel({cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(-1.0, 0.0)},
                                   KernelChoice::bilateral(1));
  const auto r = point_evaluation(bi, "z0").coeffs;
  CHECK(std::abs(r[0] - 0.5) < 1e-15);
  CHECK(std::abs(r[1] - 1.0) < 1e-15);
  CHECK(std::abs(r[2] - 0.5) < 1e-15);

  const auto with0 = rkhs_from_kernel({cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 1.0)},
                                      KernelChoice::unilateral(1));
  CHECK(with0.flags().size() == 1);
  CHECK_THROWS_AS(rkhs_from_kernel({cplx(2.0, 0.0), cplx(1.0, 0.0)}, KernelChoice::unilateral(1)),
                  Error);
}

TEST_CASE("reproducing property and closed form") {
  oracle::Gen g(31);
  for (int N : {2, 5, 10, 20}) {
    std::vector<cplx> z(static_cast<std::size_t>(N + 3));
    for (auto& p : z) p = std::polar(g.uniform(0.2, 1.0), g.uniform(0, 2 * M_PI));
    const auto F = rkhs_from_kernel(z, KernelChoice::unilateral(N));
    // Coefficient Gram is the identity, so the dual inner product of point
    // evaluations is the plain sum over the basis.
    for (std::size_t a = 0; a < z.size(); ++a)
      for (std::size_t b = 0; b < z.size(); ++b) {
        const CVec ka = point_evaluation(F, a).coeffs, kb = point_evaluation(F, b).coeffs;
        cplx ip = 0.0;
        for (Eigen::Index n = 0; n < ka.size(); ++n) ip += ka[n] * std::conj(kb[n]);
        CHECK(ip == kernel_partial_sum(z[a], z[b], KernelChoice::unilateral(N)));
      }
    for (int k = 0; k < 20; ++k) {
      const cplx u = g.unimodular(), w = g.unimodular();
      const cplx closed = 4.0 * u * std::conj(w) / (4.0 - u * std::conj(w));
      CHECK(kernel_closed_form(u, w) == closed);
      const double rel = std::abs(kernel_partial_sum(u, w, KernelChoice::unilateral(N)) - closed) /
                         std::abs(closed);
      CHECK(rel <= 4.0 * std::pow(2.0, -2 * N));
    }
  }
}

TEST_CASE("Lipschitz spaces and dual views") {
  RMat d(2, 2);
  d << 0, 2, 2, 0;
  const auto F = lipschitz_space(d, 0, true);
  const auto v = dual_space_view(F);
  CHECK(v.norm(point_evaluation(F, "p1").coeffs) == Approx(2.0));
  CHECK(v.norm(point_evaluation(F, "p0").coeffs) == Approx(1.0));
  CHECK(v.norm(point_evaluation(F, "p1").coeffs - point_evaluation(F, "p0").coeffs) ==
        Approx(2.0));

  const FunctionSpaceModel h(PhaseSpace::bare(pts({"a", "b"})), CMat::Identity(2, 2),
                             NormSpec::hilbert(CMat::Identity(2, 2)));
  CHECK(dual_space_view(h).norm(Eigen::Vector2cd(3, 4)) == Approx(5.0));
  const FunctionSpaceModel l1(PhaseSpace::bare(pts({"a", "b"})), CMat::Identity(2, 2),
                              NormSpec::lp(1.0, 2));
  CHECK(dual_space_view(l1).norm(Eigen::Vector2cd(3, -4)) == Approx(4.0));
}

TEST_CASE("point evaluation is linear in the basis") {
  oracle::Gen g(32);
  const CMat B = g.cmat(6, 3);
  const FunctionSpaceModel F(PhaseSpace::bare(pts({"a", "b", "c", "d", "e", "f"})), B,
                             NormSpec::hilbert(g.hpd(3)));
  for (int k = 0; k < 100; ++k) {
    const CVec c = g.cvec(3);
    const CVec vals = B * c;
    for (std::size_t x = 0; x < 6; ++x)
      CHECK(std::abs(point_evaluation(F, x).apply(c) - vals[static_cast<Eigen::Index>(x)]) <=
            1e-13 * (1 + std::abs(vals[static_cast<Eigen::Index>(x)])));
  }
}

TEST_CASE("2-independence implies 1-independence") {
  oracle::Gen g(33);
  for (int k = 0; k < 30; ++k) {
    const int m = g.integer(2, 7);
    std::vector<FunctionSpaceModel> models;
    models.push_back(lipschitz_space(g.planar_metric(m), 0, k % 2 == 0));
    std::vector<cplx> z(static_cast<std::size_t>(m + 2));
    for (auto& p : z) p = std::polar(g.uniform(0.0, 1.0), g.uniform(0, 2 * M_PI));
    if (k % 5 == 0) z[0] = 0.0;
    models.push_back(rkhs_from_kernel(z, KernelChoice::unilateral(m)));
    for (const auto& F : models)
      if (is_2_independent(F).independent) CHECK(is_1_independent(F).independent);
  }
}

TEST_CASE("proximity structure") {
  RMat d(4, 4);
  d << 0, 1, 3, 4, 1, 0, 2, 3, 3, 2, 0, 1, 4, 3, 1, 0;
  const auto ps = PhaseSpace::with_metric(pts({"a", "b", "c", "d"}), d, 1.5);
  CHECK(ps.proximity_components().size() == 2);
  const auto ps2 = PhaseSpace::with_metric(pts({"a", "b", "c", "d"}), d, 2.0);
  CHECK(ps2.proximity_connected());
  const auto adj = PhaseSpace::with_adjacency(pts({"a", "b", "c"}), {{0, 1}, {2, 1}});
  CHECK(adj.proximity_connected());
  CHECK(restrict_phase(adj, {0, 2}).proximity_components().size() == 2);

  const auto F = lipschitz_space(d, 0, true, 1.5);
  const auto E = lipschitz_space(d, 1, true, 1.5);
  CHECK_THROWS_AS(disjoint_sum(F, E), Error);  // clashing ids
}
