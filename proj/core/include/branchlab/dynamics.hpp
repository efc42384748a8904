#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "branchlab/complexity.hpp"
#include "branchlab/decomposition.hpp"
#include "branchlab/tm.hpp"
#include "branchlab/weingarten.hpp"

namespace branchlab {

// Transverse-field Ising chain H = -J sum Z_i Z_{i+1} - g sum X_i, optionally
// augmented with an apparatus coupling -kappa sum_{e != s} Z_s Z_e that
// records the system site s in the rest of the chain. With
// transverse_on_system = false the field skips s, so Z_s is conserved and
// the recorded branch weights stay put.
struct HamiltonianSpec {
  double j = 1.0;
  double g = 0.0;
  double kappa = 0.0;
  int system_site = 0;
  bool apparatus = false;
  bool transverse_on_system = true;
  double dt = 0.05;
  int trotter_order = 2;  // 1 or 2

  double max_coupling() const;
};

// Trotterized exp(-i H dt)^steps; inverse applies the exact step inverses in
// reverse order. Norm preserved to 1e-10. dt * max|coupling| > 0.5 only warns.
StateVector trotter_evolve(const StateVector& state, const HamiltonianSpec& h, int steps,
                           bool inverse = false, std::string* warning = nullptr);

struct SplitterConfig {
  enum class Kind { tm, weingarten };
  Kind kind = Kind::tm;
  TmOptions tm;
  QConfig weingarten;
  CandidateFamily family;
  int min_branchiness = 1;
};

struct BranchTreeLevel {
  double time = 0;
  int step = 0;
  Decomposition decomposition;
  bool split_found = false;     // splitter reported a good split (tm) / nontrivial minimum (weingarten)
  std::string splitter_note;
  std::optional<int> branchiness;  // tm splitter
  std::optional<double> q_value;   // weingarten splitter
};

struct BranchTree {
  std::vector<BranchTreeLevel> levels;
  // edges[k](j, row-major): overlap |<later_k | U earlier_j>|^2 between
  // consecutive levels, normalized branches both sides.
  std::vector<std::vector<double>> overlaps;  // flattened (n_earlier x n_later)
  std::vector<std::vector<int>> parents;      // parents[k][child] for level k+1
  std::vector<std::string> level_errors;
};

struct TreeViolation {
  int level = 0;  // later level index
  int branch = 0;
  int candidates = 0;  // parents above threshold
  double best_fraction = 0;
};

struct TreeVerification {
  bool is_tree = false;
  double theta = 0.99;
  std::vector<TreeViolation> violations;
  int levels_checked = 0;
};

// Re-splits from scratch at each sample time and infers parentage afterward
// by forward-evolving the earlier level's normalized branches.
BranchTree track_branches(const StateVector& psi0, const HamiltonianSpec& h,
                          const std::vector<double>& sample_times, const SplitterConfig& splitter,
                          const GateSet& gs, std::optional<double> reverse_at = std::nullopt);

// Each later branch needs exactly one earlier branch holding >= theta of its
// overlap column mass.
TreeVerification verify_tree(const BranchTree& tree, double theta = 0.99);

// Contiguous level range [first, last] (indices) where the splitter kept
// finding a good split; empty when no level split.
std::optional<std::pair<int, int>> good_split_window(const BranchTree& tree);

struct GrowthPoint {
  int step = 0;
  double time = 0;
  ComplexityResult complexity;  // C(psi(t), psi0)
};

struct GrowthSeries {
  std::vector<GrowthPoint> points;
  // Steps whose certified lower bound dropped below an earlier one.
  std::vector<int> lower_bound_violations;
  std::vector<Circuit> applied_prefix;  // random-circuit mode: the gates applied
};

struct GrowthSpec {
  enum class Kind { random_circuit, hamiltonian };
  Kind kind = Kind::random_circuit;
  HamiltonianSpec hamiltonian;
  int steps_per_sample = 1;  // hamiltonian mode: trotter steps between samples
  std::uint64_t seed = 1;
};

// Complexity of psi(t) relative to psi0, one point per step up to horizon
// (sampled every `stride` steps). Random-circuit mode draws one gate per
// step, skipping immediate inverses and gates that fix the current state.
GrowthSeries complexity_growth_probe(const StateVector& psi0, const GrowthSpec& evolution, int horizon,
                                     int stride, const GateSet& gs, const SearchOptions& oracle);

}  // namespace branchlab
