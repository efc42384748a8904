#pragma once

#include "branchlab/complexity.hpp"

namespace branchlab {

// Brickwork relaxation: for L = 0, 1, ..., max_layers, optimize L alternating
// layers of parameterized adjacent two-site unitaries (single-site unitaries
// on a 1-site lattice) against the predicate margin with multi-start local
// search. Returns the first satisfying layer count as an upper bound in block
// units, else lower_bound_cutoff (not exhaustive: never a certificate).
ComplexityResult heuristic_layer_complexity(const Predicate& pred, int max_layers,
                                            const SearchOptions& opts = {});

// Margin-greedy beam search over gate-set circuits. A found circuit is a
// genuine witness, so the returned cost is a sound gate-unit upper bound.
std::optional<std::pair<Circuit, int>> discrete_witness_search(const Predicate& pred, const GateSet& gs,
                                                               const SearchOptions& opts = {});

// Applies a brick sequence to a state (witness re-simulation).
std::vector<cplx> apply_blocks(const std::vector<BrickBlock>& blocks, const StateVector& s);

}  // namespace branchlab
