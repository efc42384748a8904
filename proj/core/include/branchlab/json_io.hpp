#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "branchlab/complexity.hpp"
#include "branchlab/gates.hpp"
#include "branchlab/lattice.hpp"

namespace branchlab {

// Insertion-ordered JSON keeps report output byte-stable.
using ojson = nlohmann::ordered_json;

// State corpus file: {"n_sites": n, "amplitudes": [[re, im], ...], "label": "..."}.
// amplitudes[i] multiplies the basis state whose site-q bit is (i >> q) & 1.
ojson state_to_json(const StateVector& s);
StateVector state_from_json(const ojson& j);
StateVector load_state_file(const std::string& path);
void save_state_file(const StateVector& s, const std::string& path);

// Circuits: [{"gate": "H", "sites": [0]}, {"gate": "CNOT", "sites": [0, 1]}, ...]
ojson circuit_to_json(const Circuit& c, const GateSet& gs);
Circuit circuit_from_json(const ojson& j, const GateSet& gs, const LatticeSpec& lat);

ojson gate_set_to_json(const GateSet& gs);

ojson complexity_result_to_json(const ComplexityResult& r, const GateSet& gs);
std::string complexity_result_to_json_string(const ComplexityResult& r, const GateSet& gs);
std::optional<ComplexityResult> complexity_result_from_json_string(const std::string& text, const GateSet& gs);

// Cache key (hex) and human-readable fingerprint for a complexity query.
std::string cache_key_for_query(const Predicate& pred, const GateSet& gs, const SearchOptions& opts,
                                std::string* fingerprint);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace branchlab
