#pragma once

#include <optional>
#include <string>
#include <vector>

#include "branchlab/complexity.hpp"
#include "branchlab/decomposition.hpp"
#include "branchlab/tm.hpp"

namespace branchlab {

struct QConfig {
  double b = 1.0;                 // entropy weight
  StateVector vacuum;             // reference state, default |0...0>
  double delta = 0.01;            // fidelity tolerance for branch complexities
  SearchOptions oracle;

  static QConfig defaults(const LatticeSpec& lat);
};

struct QBranchEntry {
  double weight = 0;
  ComplexityResult complexity;  // C(normalized branch, vacuum)
  std::string label;
};

struct QReport {
  std::vector<QBranchEntry> branches;
  double complexity_term = 0;  // sum_i w_i C_i^2
  double entropy_term = 0;     // -sum_i w_i ln w_i  (>= 0)
  double b = 0;
  double q_value = 0;          // complexity_term + b * entropy_term
  bool exact = false;          // all branch complexities exact
};

// Q({psi_i}) = sum_i |psi_i|^2 [ C(psi_i_hat, vacuum)^2 - b ln |psi_i|^2 ].
// Components below the norm floor were already dropped at construction,
// matching the 0 ln 0 = 0 convention.
QReport q_functional(const Decomposition& d, const QConfig& cfg, const GateSet& gs);

struct QCandidateOutcome {
  std::string name;
  bool valid = false;
  std::string error;
  std::optional<QReport> report;
  std::size_t branch_count = 0;
};

struct QMinimizeResult {
  Decomposition best;
  QReport report;
  std::string name;
  double q_gap_to_second = 0;  // 0 when no second candidate exists
  bool near_tie = false;       // gap below tie_tol
  double tie_tol = 1e-6;
  std::vector<QCandidateOutcome> candidates;
};

// Family candidates plus greedy recursive refinement (accepted splits are
// re-split while q decreases); the trivial decomposition always competes.
// Ties break toward fewer branches, then candidate order.
QMinimizeResult minimize_q(const StateVector& psi, const QConfig& cfg, const CandidateFamily& family,
                           const GateSet& gs, double tie_tol = 1e-6);

struct BSweepRow {
  double b = 0;
  std::size_t branch_count = 0;
  double q_value = 0;
  double q_gap = 0;
  bool near_tie = false;        // within the sweep tie tolerance of the runner-up
  bool nests_in_previous = false;  // previous row's branches refine this row's
  std::string chosen;
};

// One minimize_q per b (sorted ascending); near_tie uses a coarser tolerance
// than the minimizer itself since sweeps probe the crossover region.
std::vector<BSweepRow> b_sweep(const StateVector& psi, const QConfig& base, std::vector<double> b_values,
                               const CandidateFamily& family, const GateSet& gs,
                               double sweep_tie_tol = 1e-3);

}  // namespace branchlab
