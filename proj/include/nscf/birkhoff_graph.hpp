#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nscf/birkhoff.hpp"
#include "nscf/function_space.hpp"

namespace nscf {

// Orthogonality record for an unordered pair of points a < b.
struct PairRecord {
  std::size_t a = 0;
  std::size_t b = 0;
  Orthogonality ab = Orthogonality::Orthogonal;  // a_F orthogonal to b_F
  Orthogonality ba = Orthogonality::Orthogonal;
  double margin_ab = 0.0;
  double margin_ba = 0.0;
  bool edge = false;
  // Edge present only because of indeterminate verdicts.
  bool soft = false;
};

struct BirkhoffGraph {
  using Edge = std::pair<std::size_t, std::size_t>;

  std::vector<std::string> vertices;
  std::vector<PairRecord> pairs;               // every pair, ordered (0,1), (0,2), ...
  std::vector<Edge> edges;                     // a < b, sorted
  std::vector<std::vector<std::size_t>> components;
  double tol = kDefaultOrthoTol;

  std::size_t size() const { return vertices.size(); }
  const PairRecord& pair(std::size_t i, std::size_t j) const;
  bool has_edge(std::size_t i, std::size_t j) const { return pair(i, j).edge; }
  bool connected() const { return components.size() <= 1; }
  std::size_t component_of(std::size_t v) const;
  std::size_t soft_edge_count() const;
};

// Vertices are the phase points; {x, y} is an edge unless x_F and y_F are
// mutually Birkhoff orthogonal in the dual view. Indeterminate verdicts
// count as edges and are marked soft. Throws NotIndependent if some point
// evaluation vanishes. `threads` = 0 picks the hardware concurrency.
BirkhoffGraph build_graph(const FunctionSpaceModel& F, double tol = kDefaultOrthoTol,
                          unsigned threads = 0);

// Same construction for arbitrary functionals measured in `view`.
BirkhoffGraph build_graph(const NormView& view, std::vector<std::string> ids,
                          const std::vector<CVec>& evaluations, double tol = kDefaultOrthoTol,
                          unsigned threads = 0);

// Graph with the given edges and no margin data (all listed edges hard).
BirkhoffGraph graph_from_edges(std::vector<std::string> vertices,
                               std::vector<BirkhoffGraph::Edge> edges);

std::vector<std::vector<std::size_t>> connected_components(const BirkhoffGraph& g);

struct OpennessProbe {
  std::size_t center = 0;
  std::vector<std::size_t> near_points;  // within radius, center excluded
  std::size_t adjacent = 0;
  double adjacent_fraction = 1.0;
  bool pass() const { return adjacent == near_points.size(); }
};

OpennessProbe neighborhood_openness_probe(const FunctionSpaceModel& F, const BirkhoffGraph& g,
                                          const std::string& id, double radius);
OpennessProbe neighborhood_openness_probe(const FunctionSpaceModel& F, const std::string& id,
                                          double radius, double tol = kDefaultOrthoTol);

// Graphviz text; components get distinct fill colours, soft edges are dashed.
std::string export_dot(const BirkhoffGraph& g);

}  // namespace nscf
