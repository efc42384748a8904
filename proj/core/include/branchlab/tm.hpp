#pragma once

#include <optional>
#include <string>
#include <vector>

#include "branchlab/complexity.hpp"
#include "branchlab/decomposition.hpp"

namespace branchlab {

// Certified interval for an integer complexity quantity. lower counts only
// exhaustively backed bounds; upper counts witnessed gate-unit bounds.
struct BoundInterval {
  int lower = 0;
  std::optional<int> upper;
};

BoundInterval interval_of(const ComplexityResult& r);

struct TmPairReport {
  int i = 0, j = 0;
  double epsilon = 0.1;
  ComplexityResult c_d;  // distinguishing
  ComplexityResult c_i;  // interference
  int pair_branchiness = 0;  // c_i.value - c_d.value, headline numbers
  // A lower bound on branchiness is sound when c_d has a witnessed upper
  // bound and c_i an exhaustive lower bound.
  std::optional<int> branchiness_lower() const;
  std::optional<int> branchiness_upper() const;
  bool certified() const { return branchiness_lower().has_value(); }
};

struct TmReport {
  double epsilon = 0.1;
  std::vector<double> weights;
  std::vector<std::string> labels;
  std::vector<TmPairReport> pairs;
  int c_i_min = 0;   // min over pairs of C_I
  int c_d_max = 0;   // max over pairs of C_D
  int branchiness = 0;  // c_i_min - c_d_max
  std::optional<int> branchiness_lower;  // certified, when available
  std::optional<int> branchiness_upper;
  bool certified = false;
};

struct TmOptions {
  double epsilon = 0.1;
  SearchOptions oracle;
};

// Eq-style pairwise quantities. Inputs must be normalized and orthogonal.
ComplexityResult distinguishing_complexity(const StateVector& psi_i, const StateVector& psi_j,
                                           double epsilon, const GateSet& gs,
                                           const SearchOptions& opts = {});
ComplexityResult interference_complexity(const StateVector& psi_i, const StateVector& psi_j,
                                         double epsilon, const GateSet& gs,
                                         const SearchOptions& opts = {});

// All pairs i < j on normalized components, plus the min/max aggregates.
TmReport evaluate_decomposition(const Decomposition& d, const TmOptions& opts, const GateSet& gs);

// Candidate splits fed to the searches. Kinds:
//   z_site            one {P(q=0), P(q=1)} split per site
//   pauli_eigensplit  (I +- P)/2 for Pauli strings with support <= max_support
//                     (weight-2 strings on adjacent pairs)
//   computational_subset  bit-pattern partition over a site subset
//   user              explicit projector lists
struct CandidateFamily {
  bool z_site = false;
  bool pauli_eigensplit = true;
  int max_support = 2;
  std::vector<std::vector<int>> computational_subsets;
  std::vector<std::pair<std::string, std::vector<ProjectorSpec>>> user;

  static CandidateFamily default_family() { return CandidateFamily{}; }
  static CandidateFamily z_only() {
    CandidateFamily f;
    f.z_site = true;
    f.pauli_eigensplit = false;
    return f;
  }
  // (name, projector list) in deterministic order.
  std::vector<std::pair<std::string, std::vector<ProjectorSpec>>> generate(const LatticeSpec& lat) const;
};

struct TmCandidateOutcome {
  std::string name;
  bool valid = false;       // produced >= 2 components
  std::string error;
  std::optional<TmReport> report;
  std::vector<double> weights;
};

struct TmSearchResult {
  std::optional<Decomposition> best;
  std::optional<TmReport> best_report;
  std::string best_name;
  bool found_good_split = false;  // certified branchiness >= min_branchiness
  int min_branchiness = 1;
  std::vector<TmCandidateOutcome> candidates;
};

// Evaluates every family candidate and keeps the certified-branchiness
// maximizer; ties break toward fewer components, then candidate order.
// Candidates above `report_floor` stay listed so non-uniqueness is visible.
TmSearchResult search_tm_split(const StateVector& psi, const TmOptions& opts, const CandidateFamily& family,
                               const GateSet& gs, int min_branchiness = 1, int report_floor = 0);

}  // namespace branchlab
