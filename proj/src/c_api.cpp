#include "nscf/nscf.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "nscf/error.hpp"
#include "nscf/json_io.hpp"

struct nscf_space {
  nscf::json::SpaceFile file;
};

struct nscf_graph {
  nscf::BirkhoffGraph graph;
};

namespace {

using nscf::json::Json;

thread_local std::string g_last_error;

nscf_status to_status(nscf::ErrorCode c) {
  return static_cast<nscf_status>(static_cast<int>(c) + 1);
}

template <class F>
nscf_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return NSCF_OK;
  } catch (const nscf::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return NSCF_E_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NSCF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return NSCF_E_INTERNAL;
  }
}

nscf_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return NSCF_E_NULL_ARGUMENT;
}

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

double tol_or_default(double tol) { return tol > 0.0 ? tol : nscf::kDefaultOrthoTol; }

Json parse(const char* text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    nscf::fail(nscf::ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

Json ortho_entry(const nscf::OrthoDecision& d) {
  return {{"orthogonal", d.verdict == nscf::Orthogonality::Orthogonal},
          {"verdict", nscf::to_string(d.verdict)},
          {"margin", d.margin},
          {"norm", d.norm_e},
          {"line_minimum", d.line.value},
          {"t_star", nscf::json::to_json(d.line.t_star)}};
}

const nscf::FunctionSpaceModel& require_model(const nscf_space* s) {
  if (!s->file.model)
    nscf::fail(nscf::ErrorCode::InvalidArgument, "the space file defines a norm, not a function space");
  return *s->file.model;
}

nscf_status rigidity_report(const nscf::RigidityReport& r, char** out) {
  *out = copy_out(nscf::json::dump(nscf::json::to_json(r)));
  return NSCF_OK;
}

}  // namespace

extern "C" {

const char* nscf_version(void) { return "1.0.0"; }

const char* nscf_status_name(nscf_status s) {
  switch (s) {
    case NSCF_OK: return "ok";
    case NSCF_E_IO: return "io";
    case NSCF_E_NULL_ARGUMENT: return "null_argument";
    case NSCF_E_INTERNAL: return "internal";
    default:
      if (s > NSCF_OK && s <= NSCF_E_PARSE)
        return nscf::to_string(static_cast<nscf::ErrorCode>(static_cast<int>(s) - 1));
      return "unknown";
  }
}

const char* nscf_last_error(void) { return g_last_error.c_str(); }

double nscf_default_tolerance(void) { return nscf::kDefaultOrthoTol; }

void nscf_string_free(char* s) { std::free(s); }

nscf_status nscf_space_from_json(const char* json, nscf_space** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new nscf_space{nscf::json::parse_space_file(json)}; });
}

nscf_status nscf_space_from_file(const char* path, nscf_space** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  std::ifstream in(path);
  if (!in) {
    g_last_error = std::string("cannot open ") + path;
    return NSCF_E_IO;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return nscf_space_from_json(ss.str().c_str(), out);
}

void nscf_space_free(nscf_space* space) { delete space; }

int nscf_space_has_model(const nscf_space* space) {
  return space && space->file.model ? 1 : 0;
}

size_t nscf_space_dim(const nscf_space* space) { return space ? space->file.norm->dim() : 0; }

size_t nscf_space_num_points(const nscf_space* space) {
  return space && space->file.model ? space->file.model->num_points() : 0;
}

nscf_status nscf_ortho(const nscf_space* space, const char* e_json, const char* f_json,
                       double tol, int dual, char** report_json, int* indeterminate) {
  if (!space) return null_arg("space");
  if (!e_json || !f_json) return null_arg("vector");
  if (!report_json) return null_arg("report_json");
  return guarded([&] {
    const Json ej = parse(e_json, "e"), fj = parse(f_json, "f");
    const double t = tol_or_default(tol);
    nscf::NormView view = nscf::NormView::primal(space->file.coeff_norm());
    nscf::CVec e, f;
    Json out;
    if (ej.is_string() || fj.is_string()) {
      if (!(ej.is_string() && fj.is_string()))
        nscf::fail(nscf::ErrorCode::Parse, "give both vectors inline or both as point ids");
      const auto& F = require_model(space);
      e = nscf::point_evaluation(F, ej.get<std::string>()).coeffs;
      f = nscf::point_evaluation(F, fj.get<std::string>()).coeffs;
      view = nscf::dual_space_view(F);
      out["view"] = "dual";
    } else {
      e = nscf::json::vector_from_json(ej);
      f = nscf::json::vector_from_json(fj);
      out["view"] = "primal";
    }
    const auto k = static_cast<Eigen::Index>(view.dim());
    if (e.size() != k || f.size() != k)
      nscf::fail(nscf::ErrorCode::DimensionMismatch,
                 "vectors must have " + std::to_string(k) + " entries");
    const auto ef = nscf::classify_orthogonality(view, e, f, t);
    const auto fe = nscf::classify_orthogonality(view, f, e, t);
    out["e_orth_f"] = ortho_entry(ef);
    out["f_orth_e"] = ortho_entry(fe);
    out["tol"] = t;
    if (dual) {
      if (view.dual) {
        out["dual_check"] = {{"available", false},
                             {"reason", "norming-functional test runs on coefficient vectors"}};
      } else {
        try {
          const auto a = nscf::birkhoff_dual_test(view.spec, e, f, t);
          const auto b = nscf::birkhoff_dual_test(view.spec, f, e, t);
          out["dual_check"] = {{"available", true},
                               {"e_orth_f", a.orthogonal},
                               {"slack_ef", a.slack},
                               {"f_orth_e", b.orthogonal},
                               {"slack_fe", b.slack}};
        } catch (const nscf::Error& err) {
          if (err.code() != nscf::ErrorCode::Unsupported) throw;
          out["dual_check"] = {{"available", false}, {"reason", err.what()}};
        }
      }
    }
    if (indeterminate)
      *indeterminate = ef.verdict == nscf::Orthogonality::Indeterminate ||
                       fe.verdict == nscf::Orthogonality::Indeterminate;
    *report_json = copy_out(nscf::json::dump(out));
  });
}

nscf_status nscf_graph_build(const nscf_space* space, double tol, unsigned threads,
                             nscf_graph** out) {
  if (!space) return null_arg("space");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new nscf_graph{nscf::build_graph(require_model(space), tol_or_default(tol), threads)};
  });
}

void nscf_graph_free(nscf_graph* g) { delete g; }

size_t nscf_graph_num_vertices(const nscf_graph* g) { return g ? g->graph.size() : 0; }
size_t nscf_graph_num_edges(const nscf_graph* g) { return g ? g->graph.edges.size() : 0; }
size_t nscf_graph_num_components(const nscf_graph* g) {
  return g ? g->graph.components.size() : 0;
}

nscf_status nscf_graph_json(const nscf_graph* g, char** out) {
  if (!g) return null_arg("graph");
  if (!out) return null_arg("out");
  return guarded([&] { *out = copy_out(nscf::json::dump(nscf::json::to_json(g->graph))); });
}

nscf_status nscf_graph_dot(const nscf_graph* g, char** out) {
  if (!g) return null_arg("graph");
  if (!out) return null_arg("out");
  return guarded([&] { *out = copy_out(nscf::export_dot(g->graph)); });
}

nscf_status nscf_rigidity_weight(const nscf_space* space, const char* name, double tol,
                                 char** report_json) {
  if (!space) return null_arg("space");
  if (!name) return null_arg("name");
  if (!report_json) return null_arg("report_json");
  return guarded([&] {
    const auto& F = require_model(space);
    auto it = space->file.weights.find(name);
    if (it == space->file.weights.end())
      nscf::fail(nscf::ErrorCode::InvalidArgument, std::string("no weight named '") + name + "'");
    rigidity_report(nscf::rigidity_verdict(F, it->second, tol_or_default(tol)), report_json);
  });
}

nscf_status nscf_rigidity_operator(const nscf_space* space, const char* name, double tol,
                                   char** report_json) {
  if (!space) return null_arg("space");
  if (!name) return null_arg("name");
  if (!report_json) return null_arg("report_json");
  return guarded([&] {
    const auto& F = require_model(space);
    auto it = space->file.operators.find(name);
    if (it == space->file.operators.end())
      nscf::fail(nscf::ErrorCode::InvalidArgument, std::string("no operator named '") + name + "'");
    rigidity_report(nscf::rigidity_verdict_operator(F, it->second, tol_or_default(tol)),
                    report_json);
  });
}

nscf_status nscf_corpus_scenarios(char** names_json) {
  if (!names_json) return null_arg("names_json");
  return guarded([&] { *names_json = copy_out(Json(nscf::scenario_names()).dump()); });
}

nscf_status nscf_corpus_run(const char* scenario, uint64_t seed, char** reports_json,
                            int* all_passed) {
  if (!reports_json) return null_arg("reports_json");
  return guarded([&] {
    std::vector<nscf::CorpusReport> reps;
    if (scenario) reps.push_back(nscf::run_scenario(scenario, seed));
    else reps = nscf::run_all(seed);
    Json arr = Json::array();
    bool ok = true;
    for (const auto& r : reps) {
      arr.push_back(nscf::json::to_json(r));
      ok = ok && r.passed();
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    *reports_json = copy_out(nscf::json::dump(arr));
  });
}

}  // extern "C"
