#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nscf {

struct Claim {
  // Equal: |expected - observed| <= tolerance. AtMost / AtLeast compare
  // observed against expected widened by the tolerance. Boolean compares
  // exactly. Record notes an observation and always passes.
  enum class Relation { Equal, AtMost, AtLeast, Boolean, Record };

  std::string description;
  Relation relation = Relation::Equal;
  double expected = 0.0;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

const char* to_string(Claim::Relation r);

Claim claim_equal(std::string description, double expected, double observed, double tolerance);
Claim claim_at_most(std::string description, double bound, double observed, double tolerance);
Claim claim_at_least(std::string description, double bound, double observed, double tolerance);
Claim claim_bool(std::string description, bool expected, bool observed);
Claim claim_record(std::string description, double observed);

struct CorpusReport {
  std::string scenario;
  std::vector<Claim> claims;
  // Named serialized artifacts (JSON text or Graphviz).
  std::vector<std::pair<std::string, std::string>> artifacts;

  bool passed() const;
  std::size_t failures() const;
};

// Lipschitz functions vanishing at 0 on a sample of the closed unit disk,
// multiplied by z / |z|.
CorpusReport run_lipschitz_mo(int n_points = 40, std::uint64_t seed = 1);

// Truncated unilateral kernel basis e_0..e_N sampled at `sample_points`
// roots of unity.
CorpusReport run_rkhs_shift(int N = 50, int sample_points = 64);

// Bilateral kernel basis e_-N..e_N.
CorpusReport run_rkhs_bilateral(int N = 8);

CorpusReport run_disjoint_sum(std::uint64_t seed = 1);

// Sup norm with the delta basis over a metrically connected chain.
CorpusReport run_cinfty_nonrigidity(int n_points = 40, std::uint64_t seed = 1);

struct KernelModelParams {
  int n_points = 6;
  double spacing = 0.3;
  double bandwidth = 0.5;  // exp(-d^2 / bandwidth)
  int models = 20;
  int weights = 20;
};

CorpusReport run_hilbert_rigidity(const KernelModelParams& params = {}, std::uint64_t seed = 1);

// Lipschitz space with penalized basepoint over two metric clusters whose
// gap is below 1.
CorpusReport run_lip_components(std::uint64_t seed = 1);

CorpusReport run_nsc_probe();

// Random connected models and random unitary multiplication candidates.
// Candidates with a nonconstant weight are recorded, not asserted absent.
CorpusReport run_counterexample_search(std::uint64_t seed = 1, int trials = 40);

std::vector<std::string> scenario_names();
// Throws InvalidArgument for an unknown name.
CorpusReport run_scenario(const std::string& name, std::uint64_t seed = 1);
std::vector<CorpusReport> run_all(std::uint64_t seed = 1);

}  // namespace nscf
