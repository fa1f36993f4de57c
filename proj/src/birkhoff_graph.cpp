#include "nscf/birkhoff_graph.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "nscf/error.hpp"
#include "nscf/union_find.hpp"

namespace nscf {

namespace {

std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
  // Row-major position of (i, j), i < j, in the strict upper triangle.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

void finish(BirkhoffGraph& g) {
  g.edges.clear();
  UnionFind uf(g.size());
  for (const auto& p : g.pairs)
    if (p.edge) {
      g.edges.emplace_back(p.a, p.b);
      uf.unite(p.a, p.b);
    }
  g.components = uf.classes();
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const PairRecord& BirkhoffGraph::pair(std::size_t i, std::size_t j) const {
  require(i < size() && j < size() && i != j, ErrorCode::UnknownPoint,
          "graph pair out of range");
  if (i > j) std::swap(i, j);
  return pairs[pair_index(size(), i, j)];
}

std::size_t BirkhoffGraph::component_of(std::size_t v) const {
  for (std::size_t c = 0; c < components.size(); ++c)
    if (std::find(components[c].begin(), components[c].end(), v) != components[c].end())
      return c;
  fail(ErrorCode::UnknownPoint, "vertex " + std::to_string(v) + " not in graph");
}

std::size_t BirkhoffGraph::soft_edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const PairRecord& p) { return p.soft; }));
}

BirkhoffGraph build_graph(const FunctionSpaceModel& F, double tol, unsigned threads) {
  const auto ind = is_1_independent(F);
  if (!ind.independent)
    fail(ErrorCode::NotIndependent,
         "point evaluation vanishes at '" + F.phase().point(ind.violating.front()).id +
             "'; restrict the model to points with nonzero evaluations");
  std::vector<CVec> ev(F.num_points());
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = point_evaluation(F, i).coeffs;
  return build_graph(dual_space_view(F), F.phase().ids(), ev, tol, threads);
}

BirkhoffGraph build_graph(const NormView& view, std::vector<std::string> ids,
                          const std::vector<CVec>& ev, double tol, unsigned threads) {
  require(ids.size() == ev.size(), ErrorCode::DimensionMismatch,
          "build_graph: one id per functional required");
  const std::size_t n = ev.size();
  BirkhoffGraph g;
  g.vertices = std::move(ids);
  g.tol = tol;
  g.pairs.resize(n ? n * (n - 1) / 2 : 0);
  for (std::size_t i = 0, k = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      g.pairs[k].a = i;
      g.pairs[k].b = j;
    }

  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= g.pairs.size()) return;
      PairRecord& p = g.pairs[k];
      try {
        const OrthoDecision ab = classify_orthogonality(view, ev[p.a], ev[p.b], tol);
        const OrthoDecision ba = classify_orthogonality(view, ev[p.b], ev[p.a], tol);
        p.ab = ab.verdict;
        p.ba = ba.verdict;
        p.margin_ab = ab.margin;
        p.margin_ba = ba.margin;
        p.edge = p.ab != Orthogonality::Orthogonal || p.ba != Orthogonality::Orthogonal;
        p.soft = p.edge && p.ab != Orthogonality::NotOrthogonal &&
                 p.ba != Orthogonality::NotOrthogonal;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        next = g.pairs.size();
      }
    }
  };
  unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(1, g.pairs.size())));
  if (nt <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
  finish(g);
  return g;
}

BirkhoffGraph graph_from_edges(std::vector<std::string> vertices,
                               std::vector<BirkhoffGraph::Edge> edges) {
  BirkhoffGraph g;
  g.vertices = std::move(vertices);
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.pairs.push_back({i, j});
  for (auto [a, b] : edges) {
    require(a < n && b < n && a != b, ErrorCode::UnknownPoint, "edge out of range");
    if (a > b) std::swap(a, b);
    PairRecord& p = g.pairs[pair_index(n, a, b)];
    p.edge = true;
    p.ab = p.ba = Orthogonality::NotOrthogonal;
  }
  finish(g);
  return g;
}

std::vector<std::vector<std::size_t>> connected_components(const BirkhoffGraph& g) {
  UnionFind uf(g.size());
  for (const auto& [a, b] : g.edges) uf.unite(a, b);
  return uf.classes();
}

OpennessProbe neighborhood_openness_probe(const FunctionSpaceModel& F, const BirkhoffGraph& g,
                                          const std::string& id, double radius) {
  const PhaseSpace& ph = F.phase();
  require(ph.has_metric(), ErrorCode::InvalidArgument,
          "neighborhood_openness_probe needs a metric on the phase space");
  require(g.size() == ph.size(), ErrorCode::DimensionMismatch, "graph does not match model");
  OpennessProbe r;
  r.center = ph.index_of(id);
  const auto c = static_cast<Eigen::Index>(r.center);
  for (std::size_t j = 0; j < ph.size(); ++j) {
    if (j == r.center || ph.metric()(c, static_cast<Eigen::Index>(j)) > radius) continue;
    r.near_points.push_back(j);
    if (g.has_edge(r.center, j)) ++r.adjacent;
  }
  r.adjacent_fraction =
      r.near_points.empty() ? 1.0 : static_cast<double>(r.adjacent) / r.near_points.size();
  return r;
}

OpennessProbe neighborhood_openness_probe(const FunctionSpaceModel& F, const std::string& id,
                                          double radius, double tol) {
  return neighborhood_openness_probe(F, build_graph(F, tol), id, radius);
}

std::string export_dot(const BirkhoffGraph& g) {
  static const char* palette[] = {"lightblue", "lightsalmon", "palegreen", "khaki",
                                  "plum",      "lightgrey",   "aquamarine", "pink"};
  std::ostringstream out;
  out << "graph birkhoff {\n  node [style=filled];\n";
  for (std::size_t c = 0; c < g.components.size(); ++c)
    for (std::size_t v : g.components[c])
      out << "  " << quoted(g.vertices[v]) << " [label=" << quoted(g.vertices[v])
          << ", fillcolor=" << palette[c % 8] << ", component=" << c << "];\n";
  for (const auto& p : g.pairs)
    if (p.edge)
      out << "  " << quoted(g.vertices[p.a]) << " -- " << quoted(g.vertices[p.b])
          << (p.soft ? " [style=dashed]" : "") << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace nscf
