#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nscf/birkhoff_graph.hpp"
#include "nscf/corpus.hpp"
#include "nscf/rigidity.hpp"

namespace nscf::json {

using Json = nlohmann::json;

// Complex scalars are [re, im]; plain numbers are accepted on input.
Json to_json(cplx z);
cplx complex_from_json(const Json& j);
Json to_json(const CVec& v);
CVec vector_from_json(const Json& j);
Json to_json(const std::vector<cplx>& v);
std::vector<cplx> complex_list_from_json(const Json& j);
// Matrices are arrays of rows.
Json to_json(const CMat& m);
CMat matrix_from_json(const Json& j);
Json real_to_json(const RMat& m);
RMat real_matrix_from_json(const Json& j);

// {"variant": "Lp" | "HilbertGram" | "Polyhedral" | "LipschitzFin" | "BlockSum", ...}
Json to_json(const NormSpec& spec);
NormSpec norm_from_json(const Json& j);

// {"points": [...], "proximity": {...} | null, "basis": matrix, "norm": NormSpec}
Json to_json(const FunctionSpaceModel& F);
FunctionSpaceModel model_from_json(const Json& j);

Json to_json(const BirkhoffGraph& g);
Json to_json(const RigidityReport& r);
Json to_json(const IsometryEvidence& e);
Json to_json(const Claim& c);
Json to_json(const CorpusReport& r);

// Input document for the command-line tool.
struct SpaceFile {
  std::optional<FunctionSpaceModel> model;
  std::optional<NormSpec> norm;  // set for norm-only files and for models
  std::map<std::string, CMat> operators;
  std::map<std::string, std::vector<cplx>> weights;

  const NormSpec& coeff_norm() const { return *norm; }
};

// Throws Error(Parse) on malformed JSON, DimensionMismatch on incoherent
// sections.
SpaceFile space_file_from_json(const Json& j);
SpaceFile parse_space_file(const std::string& text);

// Sorted keys, shortest round-trip doubles.
std::string dump(const Json& j, int indent = -1);

}  // namespace nscf::json
