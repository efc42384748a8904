#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "branchlab/gates.hpp"
#include "branchlab/lattice.hpp"

namespace branchlab {

class CacheStore;

enum class SearchMode { exact_bfs, heuristic_layers };
enum class ComplexityStatus { exact, upper_bound, lower_bound_cutoff };
enum class CostUnit { gates, blocks };

const char* to_string(ComplexityStatus s);
const char* to_string(SearchMode m);
const char* to_string(CostUnit u);

// One optimized two-site brick: an arbitrary 4x4 unitary on (site, site+1),
// local basis l = 2*v_a + v_b with a = site. Re-simulatable witness.
struct BrickBlock {
  int site = 0;
  std::array<cplx, 16> unitary{};
};

// Brickwork relaxation outcome, in block units.
struct BlockUpperBound {
  int blocks = 0;
  int layers = 0;
  double margin = 0;
  std::vector<BrickBlock> witness;
};

struct ComplexityResult {
  int value = 0;
  ComplexityStatus status = ComplexityStatus::exact;
  CostUnit unit = CostUnit::gates;
  int budget = 0;  // search budget this result was produced under
  // True when an exhaustive search backs the value: exact results, and
  // lower_bound_cutoff from exact mode. Heuristic cutoffs stay false.
  bool exhaustive = false;
  bool memory_limited = false;
  std::optional<Circuit> witness;  // gate-set circuit for exact / discrete upper bounds
  // Heuristic companions.
  std::optional<BlockUpperBound> block_bound;
  std::optional<int> discrete_upper_bound;  // gate-unit witnessed bound from beam search
  std::optional<Circuit> discrete_witness;

  // Largest c such that "no satisfying circuit of cost < c" is certified.
  int certified_lower_bound() const {
    if (!exhaustive) return 0;
    return value;
  }
  // Smallest witnessed gate-unit upper bound, if any.
  std::optional<int> gate_upper_bound() const {
    if (status == ComplexityStatus::exact) return value;
    if (unit == CostUnit::gates && status == ComplexityStatus::upper_bound) return value;
    return discrete_upper_bound;
  }
};

// Satisfaction predicate over the images U|probe_k>. margin >= 0 means satisfied.
struct Predicate {
  enum class Kind { state_map, tm_distinguish, tm_interfere, custom };

  Kind kind = Kind::custom;
  std::vector<StateVector> probes;
  StateVector target;       // state_map only
  double threshold = 0;     // delta or epsilon
  std::function<double(const std::vector<std::vector<cplx>>&)> custom_margin;
  std::string label;

  static Predicate state_map(StateVector source, StateVector target, double delta);
  static Predicate tm_distinguish(StateVector psi_i, StateVector psi_j, double epsilon);
  static Predicate tm_interfere(StateVector psi_i, StateVector psi_j, double epsilon);
  static Predicate custom(std::vector<StateVector> probes,
                          std::function<double(const std::vector<std::vector<cplx>>&)> margin,
                          std::string label = "custom");

  double margin(const std::vector<std::vector<cplx>>& images) const;
  bool satisfied(const std::vector<std::vector<cplx>>& images) const {
    return margin(images) >= -1e-9;
  }
  double evaluate_circuit_margin(const Circuit& c, const GateSet& gs) const;
  const LatticeSpec& lattice() const;
};

struct SearchOptions {
  SearchMode mode = SearchMode::exact_bfs;
  int budget = 12;  // heuristic callers usually raise this (default 40 via query_complexity)
  std::uint64_t seed = 1;
  std::size_t node_limit = 2'000'000;
  double dedup_grid = 1e-6;
  // heuristic knobs
  int max_layers = 8;
  int restarts = 8;
  int opt_iterations = 250;
  int beam_width = 64;
  int beam_depth = 40;
  CacheStore* cache = nullptr;
};

struct ComplexityQuery {
  Predicate predicate;
  SearchOptions options;
};

// Exhaustive breadth-first synthesis over the instruction table, deduplicated
// by a phase-canonical grid hash of the images of the predicate's probe
// states. Ties at equal cost resolve to the lexicographically least
// instruction encoding. Returns exact on success, else lower_bound_cutoff
// with value = exhausted budget + 1 (memory_limited when the node cap hit).
ComplexityResult bfs_synthesize(const Predicate& pred, const GateSet& gs, int budget,
                                const SearchOptions& opts = {});

// Minimum gate cost c with |<target|U|source>| >= 1 - delta for some cost-c
// circuit. Exact mode runs meet-in-the-middle when the gate set is inverse
// closed with unit costs, plain BFS otherwise.
ComplexityResult state_complexity(const StateVector& source, const StateVector& target, double delta,
                                  const GateSet& gs, const SearchOptions& opts = {});

// Dispatch on the query's predicate kind with the same certification
// semantics as state_complexity. Heuristic mode attaches the brickwork
// block bound and a discrete witnessed bound; for tm predicates the
// headline value is the block bound, for state_map the discrete one.
ComplexityResult query_complexity(const ComplexityQuery& q, const GateSet& gs);

}  // namespace branchlab
