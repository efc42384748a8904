#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "branchlab/lattice.hpp"

namespace branchlab {

// Elementary gate. arity 1 uses m[0..3] row-major; arity 2 uses all 16
// entries over the local basis l = 2*v_a + v_b for a gate placed on
// sites (a, b), a = first site named in the application.
struct Gate {
  std::string name;
  int arity = 1;
  std::array<cplx, 16> m{};
  int cost = 1;
};

class GateSet {
 public:
  static GateSet standard();  // H, T, Tdg, S, Sdg, X, Z and CNOT (both orientations via site order)

  GateSet(std::vector<Gate> singles, std::vector<Gate> twos);

  const std::vector<Gate>& singles() const { return singles_; }
  const std::vector<Gate>& twos() const { return twos_; }
  // Index into the combined list: singles first, then two-site gates.
  const Gate& gate(int id) const;
  int gate_count() const { return static_cast<int>(singles_.size() + twos_.size()); }
  std::optional<int> find(const std::string& name) const;

  bool inverse_closed() const { return inverse_closed_; }
  bool unit_costs() const { return unit_costs_; }
  int max_cost() const { return max_cost_; }
  // Gate id whose matrix is the inverse, when present in the set.
  std::optional<int> inverse_of(int id) const;
  // Stable content fingerprint, used for cache keys.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  std::vector<Gate> singles_;
  std::vector<Gate> twos_;
  std::vector<int> inverse_;  // -1 when missing
  bool inverse_closed_ = false;
  bool unit_costs_ = true;
  int max_cost_ = 1;
  std::uint64_t fingerprint_ = 0;
};

// One placed gate: id indexes GateSet::gate, sites[1] = -1 for arity 1.
struct GateApp {
  std::int16_t gate = 0;
  std::int16_t a = 0;
  std::int16_t b = -1;
  friend bool operator==(const GateApp& x, const GateApp& y) = default;
};

struct Circuit {
  std::vector<GateApp> ops;

  int cost(const GateSet& gs) const;
  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }
};

// Checks sites/ids against the lattice and set; throws on violation.
void validate_circuit(const Circuit& c, const GateSet& gs, const LatticeSpec& lat);

// U|psi>. The input state is left untouched.
StateVector apply_circuit(const StateVector& state, const Circuit& c, const GateSet& gs);
void apply_gate_inplace(std::vector<cplx>& amps, int n_sites, const Gate& g, int a, int b);

// Reverse order with per-gate inverses. Throws if the set is not inverse closed.
Circuit inverse_circuit(const Circuit& c, const GateSet& gs);

// All placements of the set's gates on a lattice in canonical order:
// for each site, every single-site gate; then for each adjacent pair
// (p, p+1), every two-site gate as (p, p+1) and as (p+1, p).
// Index order doubles as the lexicographic circuit encoding.
class InstructionTable {
 public:
  InstructionTable(const GateSet& gs, const LatticeSpec& lat);

  int size() const { return static_cast<int>(apps_.size()); }
  const GateApp& app(int i) const { return apps_[static_cast<std::size_t>(i)]; }
  int cost(int i) const { return costs_[static_cast<std::size_t>(i)]; }
  // Instruction realizing the inverse unitary on the same sites (-1 if absent).
  int inverse(int i) const { return inverse_[static_cast<std::size_t>(i)]; }
  const GateSet& gate_set() const { return *gs_; }
  const LatticeSpec& lattice() const { return lat_; }

 private:
  const GateSet* gs_;
  LatticeSpec lat_;
  std::vector<GateApp> apps_;
  std::vector<int> costs_;
  std::vector<int> inverse_;
};

}  // namespace branchlab
