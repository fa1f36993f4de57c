#include "nscf/json_io.hpp"

#include <cmath>
#include <limits>

#include "nscf/error.hpp"

namespace nscf::json {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { fail(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) parse_fail(std::string("expected an object with key '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(std::string("missing key '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::size_t index(const Json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    parse_fail(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

Json p_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

double p_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    parse_fail("p must be a number or \"inf\"");
  }
  return number(j, "p");
}

template <class Rows>
Eigen::Index check_rows(const Json& j, const char* what, Rows) {
  if (!j.is_array()) parse_fail(std::string(what) + " must be an array of rows");
  Eigen::Index cols = -1;
  for (const auto& row : j) {
    if (!row.is_array()) parse_fail(std::string(what) + " rows must be arrays");
    if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != cols)
      fail(ErrorCode::DimensionMismatch, std::string(what) + " rows have different lengths");
  }
  return std::max<Eigen::Index>(cols, 0);
}

const char* kind_name(Orthogonality o) { return to_string(o); }

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_fail("expected a number or a [re, im] pair");
}

Json to_json(const CVec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

CVec vector_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("expected an array of scalars");
  CVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

Json to_json(const std::vector<cplx>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(to_json(z));
  return out;
}

std::vector<cplx> complex_list_from_json(const Json& j) {
  if (!j.is_array()) parse_fail("expected an array of scalars");
  std::vector<cplx> out;
  for (const auto& x : j) out.push_back(complex_from_json(x));
  return out;
}

Json to_json(const CMat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

CMat matrix_from_json(const Json& j) {
  const auto cols = check_rows(j, "matrix", 0);
  CMat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), k) = complex_from_json(j[i][static_cast<std::size_t>(k)]);
  return m;
}

Json real_to_json(const RMat& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

RMat real_matrix_from_json(const Json& j) {
  const auto cols = check_rows(j, "real matrix", 0);
  RMat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), k) = number(j[i][static_cast<std::size_t>(k)], "real matrix entry");
  return m;
}

Json to_json(const NormSpec& spec) {
  Json out;
  out["variant"] = to_string(spec.kind());
  switch (spec.kind()) {
    case NormSpec::Kind::Lp:
      out["p"] = p_to_json(spec.p());
      out["dim"] = spec.dim();
      break;
    case NormSpec::Kind::HilbertGram: out["gram"] = to_json(spec.gram()); break;
    case NormSpec::Kind::Polyhedral: out["facets"] = real_to_json(spec.facets()); break;
    case NormSpec::Kind::LipschitzFin:
      out["metric"] = real_to_json(spec.metric());
      out["basepoint"] = spec.basepoint();
      out["penalize_basepoint"] = spec.penalize_basepoint();
      break;
    case NormSpec::Kind::BlockSum: {
      Json blocks = Json::array();
      for (const auto& b : spec.blocks()) blocks.push_back(to_json(b));
      out["blocks"] = std::move(blocks);
      Json comb;
      comb["p"] = p_to_json(spec.combiner().p);
      if (spec.combiner().weighted()) comb["weights"] = spec.combiner().weights;
      out["combiner"] = std::move(comb);
      break;
    }
  }
  return out;
}

NormSpec norm_from_json(const Json& j) {
  const Json& v = field(j, "variant");
  if (!v.is_string()) parse_fail("norm variant must be a string");
  const auto name = v.get<std::string>();
  if (name == "Lp") return NormSpec::lp(p_from_json(field(j, "p")), index(field(j, "dim"), "dim"));
  if (name == "HilbertGram") return NormSpec::hilbert(matrix_from_json(field(j, "gram")));
  if (name == "Polyhedral") return NormSpec::polyhedral(real_matrix_from_json(field(j, "facets")));
  if (name == "LipschitzFin") {
    const Json& pen = field(j, "penalize_basepoint");
    if (!pen.is_boolean()) parse_fail("penalize_basepoint must be a boolean");
    return NormSpec::lipschitz(real_matrix_from_json(field(j, "metric")),
                               index(field(j, "basepoint"), "basepoint"), pen.get<bool>());
  }
  if (name == "BlockSum") {
    const Json& bl = field(j, "blocks");
    if (!bl.is_array()) parse_fail("blocks must be an array");
    std::vector<NormSpec> blocks;
    for (const auto& b : bl) blocks.push_back(norm_from_json(b));
    const Json& c = field(j, "combiner");
    RhoCombiner rho = RhoCombiner::outer_lp(p_from_json(field(c, "p")));
    if (c.contains("weights")) {
      std::vector<double> w;
      if (!c["weights"].is_array()) parse_fail("combiner weights must be an array");
      for (const auto& x : c["weights"]) w.push_back(number(x, "combiner weight"));
      rho = RhoCombiner::weighted_outer_lp(rho.p, std::move(w));
    }
    return NormSpec::block_sum(std::move(blocks), std::move(rho));
  }
  parse_fail("unknown norm variant '" + name + "'");
}

Json to_json(const FunctionSpaceModel& F) {
  Json out;
  Json pts = Json::array();
  for (const auto& p : F.phase().points()) {
    Json q;
    q["id"] = p.id;
    if (p.coord) q["coord"] = to_json(*p.coord);
    pts.push_back(std::move(q));
  }
  out["points"] = std::move(pts);
  const auto& ph = F.phase();
  if (ph.has_metric()) {
    out["proximity"] = {{"metric", real_to_json(ph.metric())}, {"epsilon", ph.epsilon()}};
  } else if (ph.has_adjacency()) {
    Json edges = Json::array();
    for (const auto& [a, b] : ph.adjacency()) edges.push_back({a, b});
    out["proximity"] = {{"edges", std::move(edges)}};
  } else {
    out["proximity"] = nullptr;
  }
  out["basis"] = to_json(F.basis());
  out["norm"] = to_json(F.coeff_norm());
  if (!F.flags().empty()) out["flags"] = F.flags();
  return out;
}

FunctionSpaceModel model_from_json(const Json& j) {
  const Json& pj = field(j, "points");
  if (!pj.is_array()) parse_fail("points must be an array");
  std::vector<PhasePoint> pts;
  for (const auto& p : pj) {
    PhasePoint q;
    if (p.is_string()) {
      q.id = p.get<std::string>();
    } else {
      const Json& id = field(p, "id");
      if (!id.is_string()) parse_fail("point id must be a string");
      q.id = id.get<std::string>();
      if (p.contains("coord") && !p["coord"].is_null()) q.coord = complex_from_json(p["coord"]);
    }
    pts.push_back(std::move(q));
  }
  const auto m = pts.size();
  std::optional<PhaseSpace> phase;
  if (j.contains("proximity") && !j["proximity"].is_null()) {
    const Json& pr = j["proximity"];
    if (pr.contains("metric")) {
      RMat d = real_matrix_from_json(pr["metric"]);
      if (static_cast<std::size_t>(d.rows()) != m || static_cast<std::size_t>(d.cols()) != m)
        fail(ErrorCode::DimensionMismatch, "proximity metric must be points x points");
      phase = PhaseSpace::with_metric(std::move(pts), std::move(d),
                                      number(field(pr, "epsilon"), "epsilon"));
    } else if (pr.contains("edges")) {
      std::vector<PhaseSpace::Edge> edges;
      if (!pr["edges"].is_array()) parse_fail("proximity edges must be an array");
      for (const auto& e : pr["edges"]) {
        if (!e.is_array() || e.size() != 2) parse_fail("an edge is a pair of point indices");
        edges.emplace_back(index(e[0], "edge endpoint"), index(e[1], "edge endpoint"));
      }
      phase = PhaseSpace::with_adjacency(std::move(pts), std::move(edges));
    } else {
      parse_fail("proximity needs 'metric' and 'epsilon', or 'edges'");
    }
  } else {
    phase = PhaseSpace::bare(std::move(pts));
  }
  CMat B = matrix_from_json(field(j, "basis"));
  NormSpec norm = norm_from_json(field(j, "norm"));
  if (static_cast<std::size_t>(B.rows()) != m)
    fail(ErrorCode::DimensionMismatch, "basis must have one row per point");
  std::vector<std::string> flags;
  if (j.contains("flags")) {
    if (!j["flags"].is_array()) parse_fail("flags must be an array of strings");
    for (const auto& f : j["flags"]) {
      if (!f.is_string()) parse_fail("flags must be an array of strings");
      flags.push_back(f.get<std::string>());
    }
  }
  return FunctionSpaceModel(std::move(*phase), std::move(B), std::move(norm), std::move(flags));
}

Json to_json(const BirkhoffGraph& g) {
  Json out;
  out["vertices"] = g.vertices;
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({g.vertices[a], g.vertices[b]});
  out["edges"] = std::move(edges);
  Json comps = Json::array();
  for (const auto& c : g.components) {
    Json ids = Json::array();
    for (auto v : c) ids.push_back(g.vertices[v]);
    comps.push_back(std::move(ids));
  }
  out["components"] = std::move(comps);
  Json margins = Json::array();
  for (const auto& p : g.pairs) {
    margins.push_back({{"a", g.vertices[p.a]},
                       {"b", g.vertices[p.b]},
                       {"ab", kind_name(p.ab)},
                       {"ba", kind_name(p.ba)},
                       {"margin_ab", p.margin_ab},
                       {"margin_ba", p.margin_ba},
                       {"edge", p.edge},
                       {"soft", p.soft}});
  }
  out["margins"] = std::move(margins);
  out["tol"] = g.tol;
  return out;
}

Json to_json(const IsometryEvidence& e) {
  return {{"method", e.method},       {"exact", e.exact},
          {"isometric", e.isometric}, {"samples", e.samples},
          {"max_deviation", e.max_deviation}, {"condition", e.condition},
          {"invertible", e.invertible}};
}

Json to_json(const RigidityReport& r) {
  Json out;
  out["points"] = r.points;
  out["omega"] = to_json(r.omega);
  Json comps = Json::array();
  for (const auto& c : r.components) {
    Json ids = Json::array();
    for (auto v : c.members) ids.push_back(r.points[v]);
    comps.push_back({{"members", std::move(ids)}, {"lambda", to_json(c.lambda)}, {"spread", c.spread}});
  }
  out["components"] = std::move(comps);
  Json v;
  v["kind"] = to_string(r.verdict.kind);
  if (r.verdict.scalar()) {
    v["lambda"] = to_json(r.verdict.lambda);
  } else {
    v["component_a"] = r.verdict.component_a;
    v["component_b"] = r.verdict.component_b;
    v["lambda_a"] = to_json(r.verdict.lambda_a);
    v["lambda_b"] = to_json(r.verdict.lambda_b);
  }
  out["verdict"] = std::move(v);
  out["isometry"] = to_json(r.isometry);
  out["edges"] = r.edges;
  out["soft_edges"] = r.soft_edges;
  out["max_weight_deviation"] = r.max_weight_deviation;
  if (r.core_dim) out["core_dim"] = *r.core_dim;
  if (r.n_star) out["n_star"] = *r.n_star;
  return out;
}

Json to_json(const Claim& c) {
  Json out;
  out["description"] = c.description;
  out["relation"] = to_string(c.relation);
  if (c.relation == Claim::Relation::Boolean) {
    out["expected"] = c.expected != 0.0;
    out["observed"] = c.observed != 0.0;
  } else {
    if (c.relation != Claim::Relation::Record) out["expected"] = c.expected;
    out["observed"] = c.observed;
  }
  out["tolerance"] = c.tolerance;
  out["pass"] = c.pass;
  return out;
}

Json to_json(const CorpusReport& r) {
  Json out;
  out["scenario"] = r.scenario;
  Json claims = Json::array();
  for (const auto& c : r.claims) claims.push_back(to_json(c));
  out["claims"] = std::move(claims);
  Json art = Json::object();
  for (const auto& [name, text] : r.artifacts) art[name] = text;
  out["artifacts"] = std::move(art);
  out["passed"] = r.passed();
  return out;
}

SpaceFile space_file_from_json(const Json& j) {
  SpaceFile sf;
  const Json& sp = field(j, "space");
  if (sp.contains("variant")) {
    sf.norm = norm_from_json(sp);
  } else {
    sf.model = model_from_json(sp);
    sf.norm = sf.model->coeff_norm();
  }
  const auto k = static_cast<Eigen::Index>(sf.norm->dim());
  if (j.contains("operators") && !j["operators"].is_null()) {
    const Json& ops = j["operators"];
    if (!ops.is_object()) parse_fail("operators must map names to matrices");
    for (const auto& [name, m] : ops.items()) {
      CMat T = matrix_from_json(m);
      if (T.rows() != k || T.cols() != k)
        fail(ErrorCode::DimensionMismatch, "operator '" + name + "' must be " + std::to_string(k) +
                                               " x " + std::to_string(k));
      sf.operators.emplace(name, std::move(T));
    }
  }
  if (j.contains("weights") && !j["weights"].is_null()) {
    const Json& ws = j["weights"];
    if (!ws.is_object()) parse_fail("weights must map names to per-point lists");
    if (!sf.model && !ws.empty()) parse_fail("weights need a function space model");
    for (const auto& [name, w] : ws.items()) {
      auto v = complex_list_from_json(w);
      if (v.size() != sf.model->num_points())
        fail(ErrorCode::DimensionMismatch, "weight '" + name + "' must have one value per point");
      sf.weights.emplace(name, std::move(v));
    }
  }
  return sf;
}

SpaceFile parse_space_file(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  try {
    return space_file_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("malformed space file: ") + e.what());
  }
}

std::string dump(const Json& j, int indent) { return j.dump(indent); }

}  // namespace nscf::json
