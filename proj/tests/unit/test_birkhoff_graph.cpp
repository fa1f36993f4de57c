#include "doctest.h"
#include "nscf/birkhoff_graph.hpp"
#include "nscf/error.hpp"
#include "unit/oracles.hpp"

using namespace nscf;

namespace {

std::vector<PhasePoint> numbered(const std::string& prefix, int m) {
  std::vector<PhasePoint> out;
  for (int i = 0; i < m; ++i) out.push_back({prefix + std::to_string(i), std::nullopt});
  return out;
}

CMat gaussian_kernel(const std::vector<double>& x, double s) {
  const auto m = static_cast<Eigen::Index>(x.size());
  CMat K(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      K(i, j) = std::exp(-std::pow(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)], 2) /
                         (2 * s * s));
  return K;
}

RMat line_metric(const std::vector<double>& x) {
  const auto m = static_cast<Eigen::Index>(x.size());
  RMat d(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      d(i, j) = std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
  return d;
}

FunctionSpaceModel kernel_on_line(const std::vector<double>& x, const std::string& prefix,
                                  double eps = 0.3) {
  return hilbert_kernel_model(PhaseSpace::with_metric(numbered(prefix, static_cast<int>(x.size())),
                                                      line_metric(x), eps),
                              gaussian_kernel(x, 0.4));
}

double hilbert_margin(const CMat& W, const CVec& e, const CVec& f) {
  const double ee = (e.adjoint() * W * e)(0, 0).real();
  const double ff = (f.adjoint() * W * f)(0, 0).real();
  const double ip = std::abs((e.adjoint() * W * f)(0, 0));
  return std::sqrt(std::max(0.0, ee - ip * ip / ff)) / std::sqrt(ee) - 1.0;
}

}  // namespace

TEST_CASE("build_graph examples") {
  const FunctionSpaceModel h(PhaseSpace::bare(numbered("x", 2)), CMat::Identity(2, 2),
                             NormSpec::hilbert(CMat::Identity(2, 2)));
  auto g = build_graph(h);
  CHECK(g.edges.empty());
  CHECK(g.components.size() == 2);

  CMat K(2, 2);
  K << 1, 0.5, 0.5, 1;
  const auto kh = hilbert_kernel_model(PhaseSpace::bare(numbered("x", 2)), K);
  g = build_graph(kh);
  CHECK(g.edges.size() == 1);
  CHECK(g.connected());

  const auto F = kernel_on_line({0.0, 0.2, 0.4}, "f");
  const auto E = kernel_on_line({0.0, 0.3}, "e");
  const auto sum = disjoint_sum(F, E);
  g = build_graph(sum);
  REQUIRE(g.components.size() == 2);
  CHECK(g.components[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(g.components[1] == std::vector<std::size_t>{3, 4});

  RMat d(3, 3);
  d << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  CHECK_THROWS_AS(build_graph(lipschitz_space(d, 0, false)), Error);
}

TEST_CASE("components of explicit graphs") {
  auto g = graph_from_edges({"a", "b", "c"}, {});
  CHECK(connected_components(g).size() == 3);
  g = graph_from_edges({"a", "b", "c", "d"}, {{0, 1}, {2, 1}, {3, 2}});
  CHECK(connected_components(g).size() == 1);
  CHECK(g.connected());
  g = graph_from_edges({"a", "b", "c", "d"}, {{3, 1}});
  const auto cc = connected_components(g);
  REQUIRE(cc.size() == 3);
  CHECK(cc[1] == std::vector<std::size_t>{1, 3});
}

TEST_CASE("openness probe") {
  const auto F = kernel_on_line({0.0, 0.1, 0.2, 0.35, 0.5, 0.7}, "x");
  const auto r = neighborhood_openness_probe(F, "x2", 0.2);
  CHECK(r.near_points.size() == 3);
  CHECK(r.adjacent_fraction == 1.0);
  CHECK(r.pass());
  const auto all = neighborhood_openness_probe(F, "x0", 10.0);
  CHECK(all.near_points.size() == 5);

  const auto sum = disjoint_sum(kernel_on_line({0.0, 0.2}, "f"), kernel_on_line({0.0, 0.1}, "e"));
  const auto g = build_graph(sum);
  const auto within = neighborhood_openness_probe(sum, g, "f0", 0.5);
  CHECK(within.near_points.size() == 1);
  CHECK(within.pass());
  const auto across = neighborhood_openness_probe(sum, g, "f0", 100.0);
  CHECK(across.near_points.size() == 3);
  CHECK(across.adjacent_fraction == doctest::Approx(1.0 / 3.0));

  const FunctionSpaceModel bare(PhaseSpace::bare(numbered("x", 2)), CMat::Identity(2, 2),
                                NormSpec::lp(2.0, 2));
  CHECK_THROWS_AS(neighborhood_openness_probe(bare, "x0", 1.0), Error);
}

TEST_CASE("dot export") {
  auto dot = export_dot(graph_from_edges({"a", "b"}, {}));
  CHECK(dot.find("\"a\" [") != std::string::npos);
  CHECK(dot.find("\"b\" [") != std::string::npos);
  CHECK(dot.find("--") == std::string::npos);
  dot = export_dot(graph_from_edges({"a", "b"}, {{0, 1}}));
  CHECK(dot.find("\"a\" -- \"b\";") != std::string::npos);

  const auto sum = disjoint_sum(kernel_on_line({0.0, 0.2}, "f"), kernel_on_line({0.0, 0.1}, "e"));
  dot = export_dot(build_graph(sum));
  CHECK(dot.find("fillcolor=lightblue") != std::string::npos);
  CHECK(dot.find("fillcolor=lightsalmon") != std::string::npos);
}

TEST_CASE("edge relation is symmetric and scale invariant") {
  oracle::Gen g(41);
  for (int t = 0; t < 10; ++t) {
    const int m = g.integer(3, 6);
    // Block-diagonal Gram with rows supported on one or both blocks.
    CMat G = CMat::Zero(4, 4);
    G.topLeftCorner(2, 2) = g.hpd(2);
    G.bottomRightCorner(2, 2) = g.hpd(2);
    CMat B = CMat::Zero(m, 4);
    for (int i = 0; i < m; ++i) {
      const int kind = i < 2 ? i : g.integer(0, 2);
      if (kind != 1) B.row(i).head(2) = g.cvec(2).transpose();
      if (kind != 0) B.row(i).tail(2) = g.cvec(2).transpose();
    }
    if (oracle::rank_lu(B.real()) < 4 && oracle::rank_lu(B.imag()) < 4) continue;
    const auto ph = PhaseSpace::bare(numbered("x", m));
    const FunctionSpaceModel F(ph, B, NormSpec::hilbert(G));
    const cplx lam = g.cnormal() * 5.0;
    const FunctionSpaceModel Fs(ph, lam * B, NormSpec::hilbert(G));
    const auto g1 = build_graph(F), g2 = build_graph(Fs);
    CHECK(g1.edges == g2.edges);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b) CHECK(g1.has_edge(a, b) == g1.has_edge(b, a));
  }
}

TEST_CASE("Hilbert graphs match the dual inner product") {
  oracle::Gen g(42);
  int compared = 0;
  for (int t = 0; t < 50; ++t) {
    const int m = g.integer(3, 6);
    CMat G = CMat::Zero(4, 4);
    G.topLeftCorner(2, 2) = g.hpd(2);
    G.bottomRightCorner(2, 2) = g.hpd(2);
    CMat B(m, 4);
    for (int i = 0; i < m; ++i) {
      const int kind = i < 2 ? i : g.integer(0, 2);
      B.row(i).setZero();
      if (kind != 1) B.row(i).head(2) = g.cvec(2).transpose();
      if (kind != 0) B.row(i).tail(2) = g.cvec(2).transpose();
    }
    FunctionSpaceModel* F = nullptr;
    std::optional<FunctionSpaceModel> holder;
    try {
      holder.emplace(PhaseSpace::bare(numbered("x", m)), B, NormSpec::hilbert(G));
      F = &*holder;
    } catch (const Error&) {
      continue;
    }
    const CMat W = G.inverse().conjugate();
    const auto gr = build_graph(*F);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const CVec ea = B.row(a).transpose(), eb = B.row(b).transpose();
        const double mab = hilbert_margin(W, ea, eb), mba = hilbert_margin(W, eb, ea);
        if ((mab >= -1e-6 && mab < -1e-8) || (mba >= -1e-6 && mba < -1e-8)) continue;
        const bool inner_nonzero =
            std::abs((ea.adjoint() * W * eb)(0, 0)) > 1e-9 * std::sqrt(
                (ea.adjoint() * W * ea)(0, 0).real() * (eb.adjoint() * W * eb)(0, 0).real());
        CHECK(gr.has_edge(a, b) == inner_nonzero);
        ++compared;
      }
  }
  CHECK(compared > 200);
}

TEST_CASE("parallel and serial construction agree") {
  const auto F = kernel_on_line({0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 2.5}, "x");
  const auto a = build_graph(F, kDefaultOrthoTol, 1);
  const auto b = build_graph(F, kDefaultOrthoTol, 4);
  CHECK(a.edges == b.edges);
  for (std::size_t k = 0; k < a.pairs.size(); ++k) CHECK(a.pairs[k].margin_ab == b.pairs[k].margin_ab);
}
