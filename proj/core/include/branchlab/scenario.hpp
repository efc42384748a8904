#pragma once

#include <optional>
#include <string>
#include <vector>

#include "branchlab/cache.hpp"
#include "branchlab/dynamics.hpp"
#include "branchlab/json_io.hpp"
#include "branchlab/sampling.hpp"

namespace branchlab {

// Parsed scenario file. Sections are optional; each subcommand states which
// ones it needs. Validation is strict: unknown keys anywhere are rejected.
struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  LatticeSpec lattice;
  ojson raw;  // resolved configuration embedded into every report

  StateVector initial_state(const GateSet& gs) const;

  // splitter
  bool has_splitter = false;
  SplitterConfig splitter;

  // dynamics
  bool has_dynamics = false;
  HamiltonianSpec hamiltonian;
  std::vector<double> sample_times;
  std::optional<double> reverse_at;
  double theta = 0.99;

  // sampling
  bool has_sampling = false;
  int n_samples = 10000;
  std::vector<Observable> observables;

  // complexity section
  bool has_complexity = false;
  std::string complexity_kind;  // state_map | tm_distinguish | tm_interfere | growth_probe
  ojson complexity_other;       // state spec for the second state
  double complexity_delta = 0.01;
  double complexity_epsilon = 0.1;
  int probe_horizon = 6;
  int probe_stride = 1;
  std::vector<std::uint64_t> probe_seeds;

  // sweep section
  bool has_sweep = false;
  std::vector<double> sweep_b_values;

 private:
  ojson initial_state_spec_;
  friend Scenario scenario_from_json(const ojson& j);
};

// Full diagnostics list; entries starting with "warning:" are non-fatal.
std::vector<std::string> validate_scenario(const ojson& j);
bool diagnostics_fatal(const std::vector<std::string>& diags);

// Builds a Scenario from JSON that already passed validation.
Scenario scenario_from_json(const ojson& j);
Scenario load_scenario(const std::string& path, std::vector<std::string>* diagnostics);

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<SearchMode> mode;
  std::optional<int> budget;
  CacheStore* cache = nullptr;
};

struct RunOutput {
  ojson report;
  // (relative filename, contents) for CSV side outputs.
  std::vector<std::pair<std::string, std::string>> files;
};

// Subcommands: complexity, tm, weingarten, evolve, sample, compare.
// Throws std::invalid_argument on scenario/section misuse (exit code 1 at the
// CLI) and std::runtime_error on execution failures (exit code 2).
RunOutput run_subcommand(const std::string& subcommand, const Scenario& scenario,
                         const RunOverrides& overrides, const GateSet& gs);

// State spec parser shared with the complexity section ("other" states).
StateVector state_from_spec(const ojson& spec, const LatticeSpec& lat, const GateSet& gs,
                            std::uint64_t seed);

// Deterministic random circuit of the given length: uniform over placements,
// skipping immediate inverses and gates that fix the current state.
Circuit random_circuit(const LatticeSpec& lat, const GateSet& gs, int length, std::uint64_t seed);

std::string csv_escape(const std::string& s);

}  // namespace branchlab
