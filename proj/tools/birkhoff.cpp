#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nscf/nscf.h"

namespace {

using Json = nlohmann::json;

enum Exit { kOk = 0, kError = 1, kUsage = 2, kIndeterminate = 3, kNotMultiplier = 4, kNotIsometric = 5 };

int exit_for(nscf_status s) {
  switch (s) {
    case NSCF_OK: return kOk;
    case NSCF_E_PARSE:
    case NSCF_E_IO:
    case NSCF_E_DIMENSION_MISMATCH:
    case NSCF_E_UNKNOWN_POINT:
    case NSCF_E_NOT_INDEPENDENT:
    case NSCF_E_INVALID_ARGUMENT:
    case NSCF_E_INVALID_METRIC:
    case NSCF_E_NOT_POSITIVE_DEFINITE:
    case NSCF_E_ILL_CONDITIONED:
    case NSCF_E_UNBOUNDED_BALL:
    case NSCF_E_NULL_ARGUMENT: return kUsage;
    case NSCF_E_NOT_MULTIPLIER: return kNotMultiplier;
    case NSCF_E_NOT_ISOMETRIC: return kNotIsometric;
    default: return kError;
  }
}

int report_failure(nscf_status s) {
  std::cerr << "error (" << nscf_status_name(s) << "): " << nscf_last_error() << "\n";
  return exit_for(s);
}

struct StringDeleter {
  void operator()(char* p) const { nscf_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct SpaceDeleter {
  void operator()(nscf_space* p) const { nscf_space_free(p); }
};
struct GraphDeleter {
  void operator()(nscf_graph* p) const { nscf_graph_free(p); }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

std::string fmt_complex(const Json& z) {
  const double re = z[0].get<double>(), im = z[1].get<double>();
  if (im == 0.0) return fmt(re);
  std::ostringstream os;
  os << fmt(re) << (im < 0 ? " - " : " + ") << fmt(std::abs(im)) << "i";
  return os.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  return static_cast<bool>(out);
}

// Tolerance from --tol, else BIRKHOFF_TOL, else the library default.
bool resolve_tol(double flag, double& tol) {
  if (flag > 0.0) {
    tol = flag;
    return true;
  }
  tol = nscf_default_tolerance();
  if (const char* env = std::getenv("BIRKHOFF_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      std::cerr << "error: BIRKHOFF_TOL must be a positive number, got '" << env << "'\n";
      return false;
    }
    tol = v;
  }
  return true;
}

int load(const std::string& path, std::unique_ptr<nscf_space, SpaceDeleter>& out) {
  nscf_space* s = nullptr;
  const auto st = nscf_space_from_file(path.c_str(), &s);
  if (st != NSCF_OK) return report_failure(st);
  out.reset(s);
  return kOk;
}

// Inline JSON arrays pass through; anything else names a point.
std::string vector_arg(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && arg[first] == '[') return arg;
  return Json(arg).dump();
}

struct OrthoArgs {
  std::string file, e, f;
  double tol = 0.0;
  bool dual = false, json = false;
};

int cmd_ortho(const OrthoArgs& a) {
  double tol;
  if (!resolve_tol(a.tol, tol)) return kUsage;
  std::unique_ptr<nscf_space, SpaceDeleter> space;
  if (int rc = load(a.file, space)) return rc;
  char* raw = nullptr;
  int indeterminate = 0;
  const auto st = nscf_ortho(space.get(), vector_arg(a.e).c_str(), vector_arg(a.f).c_str(), tol,
                             a.dual ? 1 : 0, &raw, &indeterminate);
  if (st != NSCF_OK) return report_failure(st);
  OwnedString text(raw);
  if (a.json) {
    std::cout << text.get() << "\n";
  } else {
    const Json r = Json::parse(text.get());
    auto line = [](const char* label, const Json& d) {
      std::cout << label << ": " << (d["orthogonal"].get<bool>() ? "true" : "false") << "  ("
                << d["verdict"].get<std::string>() << ", margin " << fmt(d["margin"].get<double>())
                << ", norm " << fmt(d["norm"].get<double>()) << ")\n";
    };
    std::cout << "view: " << r["view"].get<std::string>() << ", tol " << fmt(tol) << "\n";
    line("e⊢f", r["e_orth_f"]);
    line("f⊢e", r["f_orth_e"]);
    if (r.contains("dual_check")) {
      const auto& d = r["dual_check"];
      if (d["available"].get<bool>())
        std::cout << "dual check: e⊢f " << (d["e_orth_f"].get<bool>() ? "true" : "false")
                  << " (slack " << fmt(d["slack_ef"].get<double>()) << "), f⊢e "
                  << (d["f_orth_e"].get<bool>() ? "true" : "false") << " (slack "
                  << fmt(d["slack_fe"].get<double>()) << ")\n";
      else
        std::cout << "dual check unavailable: " << d["reason"].get<std::string>() << "\n";
    }
  }
  if (indeterminate) {
    std::cerr << "indeterminate: a margin lies in the indeterminate band\n";
    return kIndeterminate;
  }
  return kOk;
}

struct GraphArgs {
  std::string file, dot, json;
  double tol = 0.0;
  unsigned threads = 0;
};

int cmd_graph(const GraphArgs& a) {
  double tol;
  if (!resolve_tol(a.tol, tol)) return kUsage;
  std::unique_ptr<nscf_space, SpaceDeleter> space;
  if (int rc = load(a.file, space)) return rc;
  nscf_graph* raw = nullptr;
  auto st = nscf_graph_build(space.get(), tol, a.threads, &raw);
  if (st != NSCF_OK) return report_failure(st);
  std::unique_ptr<nscf_graph, GraphDeleter> g(raw);
  char* js = nullptr;
  if ((st = nscf_graph_json(g.get(), &js)) != NSCF_OK) return report_failure(st);
  OwnedString text(js);
  const Json r = Json::parse(text.get());
  std::cout << "vertices: " << nscf_graph_num_vertices(g.get())
            << ", edges: " << nscf_graph_num_edges(g.get())
            << ", components: " << nscf_graph_num_components(g.get()) << "\n";
  std::size_t i = 0;
  for (const auto& c : r["components"]) {
    std::cout << "  component " << i++ << ":";
    for (const auto& id : c) std::cout << " " << id.get<std::string>();
    std::cout << "\n";
  }
  if (!a.json.empty() && !write_file(a.json, text.get())) return kError;
  if (!a.dot.empty()) {
    char* dot = nullptr;
    if ((st = nscf_graph_dot(g.get(), &dot)) != NSCF_OK) return report_failure(st);
    OwnedString d(dot);
    if (!write_file(a.dot, d.get())) return kError;
  }
  return kOk;
}

struct RigidityArgs {
  std::string file, weight, op, json;
  double tol = 0.0;
};

int cmd_rigidity(const RigidityArgs& a) {
  double tol;
  if (!resolve_tol(a.tol, tol)) return kUsage;
  std::unique_ptr<nscf_space, SpaceDeleter> space;
  if (int rc = load(a.file, space)) return rc;
  char* raw = nullptr;
  const auto st = a.weight.empty()
                      ? nscf_rigidity_operator(space.get(), a.op.c_str(), tol, &raw)
                      : nscf_rigidity_weight(space.get(), a.weight.c_str(), tol, &raw);
  if (st != NSCF_OK) return report_failure(st);
  OwnedString text(raw);
  const Json r = Json::parse(text.get());
  std::vector<std::size_t> comp_of(r["points"].size(), 0);
  for (std::size_t c = 0; c < r["components"].size(); ++c)
    for (const auto& id : r["components"][c]["members"])
      for (std::size_t p = 0; p < r["points"].size(); ++p)
        if (r["points"][p] == id) comp_of[p] = c;
  std::cout << std::left << std::setw(12) << "point" << std::setw(26) << "omega" << std::setw(11)
            << "component" << "lambda\n";
  for (std::size_t p = 0; p < r["points"].size(); ++p)
    std::cout << std::setw(12) << r["points"][p].get<std::string>() << std::setw(26)
              << fmt_complex(r["omega"][p]) << std::setw(11) << comp_of[p]
              << fmt_complex(r["components"][comp_of[p]]["lambda"]) << "\n";
  const auto& v = r["verdict"];
  const auto& iso = r["isometry"];
  std::cout << "isometry: " << iso["method"].get<std::string>()
            << (iso["exact"].get<bool>() ? " (exact)" : " (sampled)") << ", deviation "
            << fmt(iso["max_deviation"].get<double>()) << ", condition "
            << fmt(iso["condition"].get<double>()) << "\n";
  std::cout << "edges: " << r["edges"].get<std::size_t>() << " (" << r["soft_edges"].get<std::size_t>()
            << " soft)\n";
  if (v["kind"] == "scalar")
    std::cout << "verdict: Scalar(" << fmt_complex(v["lambda"]) << ")\n";
  else
    std::cout << "verdict: NonScalarWitness (component " << v["component_a"].get<std::size_t>() << ": "
              << fmt_complex(v["lambda_a"]) << ", component " << v["component_b"].get<std::size_t>()
              << ": " << fmt_complex(v["lambda_b"]) << ")\n";
  if (!a.json.empty() && !write_file(a.json, text.get())) return kError;
  return kOk;
}

struct CorpusArgs {
  std::string scenario, json;
  bool all = false, list = false;
  std::uint64_t seed = 1;
};

int cmd_corpus(const CorpusArgs& a) {
  if (a.list) {
    char* raw = nullptr;
    const auto st = nscf_corpus_scenarios(&raw);
    if (st != NSCF_OK) return report_failure(st);
    OwnedString text(raw);
    for (const auto& n : Json::parse(text.get())) std::cout << n.get<std::string>() << "\n";
    return kOk;
  }
  if (a.all == !a.scenario.empty()) {
    std::cerr << "error: give exactly one of --scenario NAME or --all\n";
    return kUsage;
  }
  char* raw = nullptr;
  int ok = 0;
  const auto st = nscf_corpus_run(a.all ? nullptr : a.scenario.c_str(), a.seed, &raw, &ok);
  if (st != NSCF_OK) return report_failure(st);
  OwnedString text(raw);
  const Json reps = Json::parse(text.get());
  for (const auto& rep : reps) {
    std::cout << "== " << rep["scenario"].get<std::string>() << ": "
              << (rep["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
    for (const auto& c : rep["claims"]) {
      auto show = [&](const char* key) -> std::string {
        if (!c.contains(key)) return "-";
        const auto& x = c[key];
        if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
        return fmt(x.get<double>());
      };
      std::cout << "  [" << (c["pass"].get<bool>() ? "pass" : "FAIL") << "] "
                << c["description"].get<std::string>() << "  expected " << show("expected")
                << " (" << c["relation"].get<std::string>() << ", tol "
                << fmt(c["tolerance"].get<double>()) << "), observed " << show("observed") << "\n";
    }
  }
  if (!a.json.empty() && !write_file(a.json, text.get())) return kError;
  return ok ? kOk : kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birkhoff-James orthogonality, Birkhoff graphs and rigidity checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nscf_version());

  OrthoArgs oa;
  auto* ortho = app.add_subcommand("ortho", "Orthogonality of two vectors in both orders");
  ortho->add_option("file", oa.file, "Space file (JSON)")->required();
  ortho->add_option("e", oa.e, "JSON array of scalars, or a point id")->required();
  ortho->add_option("f", oa.f, "JSON array of scalars, or a point id")->required();
  ortho->add_option("--tol", oa.tol, "Decision tolerance (default: BIRKHOFF_TOL or 1e-7)");
  ortho->add_flag("--dual", oa.dual, "Add the norming-functional cross-check");
  ortho->add_flag("--json", oa.json, "Print the JSON report");

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "Birkhoff graph of a function space model");
  graph->add_option("file", ga.file, "Space file (JSON)")->required();
  graph->add_option("--tol", ga.tol, "Decision tolerance");
  graph->add_option("--dot", ga.dot, "Write Graphviz output");
  graph->add_option("--json", ga.json, "Write the JSON graph");
  graph->add_option("--threads", ga.threads, "Worker threads (0 = hardware)");

  RigidityArgs ra;
  auto* rig = app.add_subcommand("rigidity", "Rigidity verdict for a weight or an operator");
  rig->add_option("file", ra.file, "Space file (JSON)")->required();
  auto* w = rig->add_option("--weight", ra.weight, "Name of a weight in the file");
  auto* o = rig->add_option("--operator", ra.op, "Name of an operator in the file");
  w->excludes(o);
  rig->add_option("--tol", ra.tol, "Decision tolerance");
  rig->add_option("--json", ra.json, "Write the JSON report");

  CorpusArgs ca;
  auto* corpus = app.add_subcommand("corpus", "Run the example corpus");
  corpus->add_option("--scenario", ca.scenario, "Scenario name");
  corpus->add_flag("--all", ca.all, "Run every scenario");
  corpus->add_flag("--list", ca.list, "List scenario names");
  corpus->add_option("--seed", ca.seed, "Random seed");
  corpus->add_option("--json", ca.json, "Write the JSON reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }
  if (rig->parsed() && ra.weight.empty() == ra.op.empty()) {
    std::cerr << "error: give exactly one of --weight NAME or --operator NAME\n";
    return kUsage;
  }
  if (ortho->parsed()) return cmd_ortho(oa);
  if (graph->parsed()) return cmd_graph(ga);
  if (rig->parsed()) return cmd_rigidity(ra);
  return cmd_corpus(ca);
}
