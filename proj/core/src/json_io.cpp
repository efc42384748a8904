#include "branchlab/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "branchlab/rng.hpp"

namespace branchlab {

ojson state_to_json(const StateVector& s) {
  ojson j;
  j["n_sites"] = s.lattice().n_sites;
  ojson amps = ojson::array();
  for (const cplx& a : s.amplitudes()) amps.push_back(ojson::array({a.real(), a.imag()}));
  j["amplitudes"] = std::move(amps);
  j["label"] = s.label();
  return j;
}

StateVector state_from_json(const ojson& j) {
  if (!j.contains("n_sites") || !j.contains("amplitudes")) {
    throw std::invalid_argument("state json: needs n_sites and amplitudes");
  }
  LatticeSpec lat(j.at("n_sites").get<int>());
  const auto& arr = j.at("amplitudes");
  if (!arr.is_array() || arr.size() != lat.dim()) {
    throw std::invalid_argument("state json: amplitude count != 2^n_sites");
  }
  std::vector<cplx> amps;
  amps.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("state json: amplitudes must be [re, im] pairs");
    amps.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  StateVector s(lat, std::move(amps));
  if (j.contains("label")) s.set_label(j.at("label").get<std::string>());
  return s;
}

StateVector load_state_file(const std::string& path) {
  return state_from_json(ojson::parse(read_text_file(path)));
}

void save_state_file(const StateVector& s, const std::string& path) {
  write_text_file(path, state_to_json(s).dump(2) + "\n");
}

ojson circuit_to_json(const Circuit& c, const GateSet& gs) {
  ojson arr = ojson::array();
  for (const GateApp& op : c.ops) {
    ojson g;
    g["gate"] = gs.gate(op.gate).name;
    ojson sites = ojson::array({op.a});
    if (op.b >= 0) sites.push_back(op.b);
    g["sites"] = std::move(sites);
    arr.push_back(std::move(g));
  }
  return arr;
}

Circuit circuit_from_json(const ojson& j, const GateSet& gs, const LatticeSpec& lat) {
  if (!j.is_array()) throw std::invalid_argument("circuit json: expected an array");
  Circuit c;
  for (const auto& e : j) {
    if (!e.contains("gate") || !e.contains("sites")) {
      throw std::invalid_argument("circuit json: each entry needs gate and sites");
    }
    std::string name = e.at("gate").get<std::string>();
    auto id = gs.find(name);
    if (!id) throw std::invalid_argument("circuit json: gate '" + name + "' not in gate set");
    const auto& sites = e.at("sites");
    GateApp op;
    op.gate = static_cast<std::int16_t>(*id);
    if (gs.gate(*id).arity == 1) {
      if (sites.size() != 1) throw std::invalid_argument("circuit json: " + name + " takes one site");
      op.a = static_cast<std::int16_t>(sites[0].get<int>());
      op.b = -1;
    } else {
      if (sites.size() != 2) throw std::invalid_argument("circuit json: " + name + " takes two sites");
      op.a = static_cast<std::int16_t>(sites[0].get<int>());
      op.b = static_cast<std::int16_t>(sites[1].get<int>());
    }
    c.ops.push_back(op);
  }
  validate_circuit(c, gs, lat);
  return c;
}

ojson gate_set_to_json(const GateSet& gs) {
  auto mat = [](const Gate& g) {
    int d = g.arity == 1 ? 2 : 4;
    ojson rows = ojson::array();
    for (int r = 0; r < d; ++r) {
      ojson row = ojson::array();
      for (int c = 0; c < d; ++c) {
        const cplx& z = g.m[static_cast<std::size_t>(r * d + c)];
        row.push_back(ojson::array({z.real(), z.imag()}));
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  ojson j;
  ojson singles = ojson::array();
  for (const Gate& g : gs.singles()) {
    singles.push_back(ojson{{"name", g.name}, {"cost", g.cost}, {"matrix", mat(g)}});
  }
  ojson twos = ojson::array();
  for (const Gate& g : gs.twos()) {
    twos.push_back(ojson{{"name", g.name}, {"cost", g.cost}, {"matrix", mat(g)}});
  }
  j["single_site_gates"] = std::move(singles);
  j["two_site_gates"] = std::move(twos);
  j["inverse_closed"] = gs.inverse_closed();
  return j;
}

ojson complexity_result_to_json(const ComplexityResult& r, const GateSet& gs) {
  ojson j;
  j["value"] = r.value;
  j["status"] = to_string(r.status);
  j["unit"] = to_string(r.unit);
  j["budget"] = r.budget;
  j["exhaustive"] = r.exhaustive;
  j["certified_lower_bound"] = r.certified_lower_bound();
  if (r.memory_limited) j["memory_limited"] = true;
  if (r.witness) j["witness"] = circuit_to_json(*r.witness, gs);
  if (r.block_bound) {
    ojson b;
    b["blocks"] = r.block_bound->blocks;
    b["layers"] = r.block_bound->layers;
    b["margin"] = r.block_bound->margin;
    ojson blocks = ojson::array();
    for (const BrickBlock& blk : r.block_bound->witness) {
      ojson m = ojson::array();
      for (int k = 0; k < 16; ++k) {
        m.push_back(ojson::array({blk.unitary[static_cast<std::size_t>(k)].real(),
                                  blk.unitary[static_cast<std::size_t>(k)].imag()}));
      }
      blocks.push_back(ojson{{"site", blk.site}, {"matrix", std::move(m)}});
    }
    b["block_witness"] = std::move(blocks);
    j["block_bound"] = std::move(b);
  }
  if (r.discrete_upper_bound) j["discrete_upper_bound"] = *r.discrete_upper_bound;
  if (r.discrete_witness) j["discrete_witness"] = circuit_to_json(*r.discrete_witness, gs);
  return j;
}

std::string complexity_result_to_json_string(const ComplexityResult& r, const GateSet& gs) {
  return complexity_result_to_json(r, gs).dump();
}

namespace {

ComplexityStatus status_from_string(const std::string& s) {
  if (s == "exact") return ComplexityStatus::exact;
  if (s == "upper_bound") return ComplexityStatus::upper_bound;
  if (s == "lower_bound_cutoff") return ComplexityStatus::lower_bound_cutoff;
  throw std::invalid_argument("unknown complexity status: " + s);
}

}  // namespace

std::optional<ComplexityResult> complexity_result_from_json_string(const std::string& text, const GateSet& gs) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  try {
    ComplexityResult r;
    r.value = j.at("value").get<int>();
    r.status = status_from_string(j.at("status").get<std::string>());
    r.unit = j.at("unit").get<std::string>() == "blocks" ? CostUnit::blocks : CostUnit::gates;
    r.budget = j.at("budget").get<int>();
    r.exhaustive = j.at("exhaustive").get<bool>();
    r.memory_limited = j.value("memory_limited", false);
    // Witness circuits need a lattice bound; accept the widest site index used.
    auto parse_circuit = [&](const ojson& cj) {
      int max_site = 0;
      for (const auto& e : cj) {
        for (const auto& s : e.at("sites")) max_site = std::max(max_site, s.get<int>());
      }
      return circuit_from_json(cj, gs, LatticeSpec(std::max(1, max_site + 1)));
    };
    if (j.contains("witness")) r.witness = parse_circuit(j.at("witness"));
    if (j.contains("discrete_upper_bound")) r.discrete_upper_bound = j.at("discrete_upper_bound").get<int>();
    if (j.contains("discrete_witness")) r.discrete_witness = parse_circuit(j.at("discrete_witness"));
    if (j.contains("block_bound")) {
      BlockUpperBound b;
      const ojson& bj = j.at("block_bound");
      b.blocks = bj.at("blocks").get<int>();
      b.layers = bj.at("layers").get<int>();
      b.margin = bj.at("margin").get<double>();
      for (const auto& blk : bj.at("block_witness")) {
        BrickBlock bb;
        bb.site = blk.at("site").get<int>();
        const auto& m = blk.at("matrix");
        for (int k = 0; k < 16; ++k) {
          bb.unitary[static_cast<std::size_t>(k)] = cplx(m[static_cast<std::size_t>(k)][0].get<double>(),
                                                         m[static_cast<std::size_t>(k)][1].get<double>());
        }
        b.witness.push_back(bb);
      }
      r.block_bound = std::move(b);
    }
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string cache_key_for_query(const Predicate& pred, const GateSet& gs, const SearchOptions& opts,
                                std::string* fingerprint) {
  ojson j;
  switch (pred.kind) {
    case Predicate::Kind::state_map:
      j["kind"] = "state_map";
      break;
    case Predicate::Kind::tm_distinguish:
      j["kind"] = "tm_distinguish";
      break;
    case Predicate::Kind::tm_interfere:
      j["kind"] = "tm_interfere";
      break;
    case Predicate::Kind::custom:
      j["kind"] = "custom";
      break;
  }
  j["threshold"] = pred.threshold;
  auto round_state = [](const StateVector& s) {
    ojson arr = ojson::array();
    for (const cplx& a : s.amplitudes()) {
      arr.push_back(ojson::array({std::round(a.real() * 1e12), std::round(a.imag() * 1e12)}));
    }
    return arr;
  };
  ojson probes = ojson::array();
  for (const StateVector& p : pred.probes) probes.push_back(round_state(p));
  j["probes"] = std::move(probes);
  if (pred.kind == Predicate::Kind::state_map) j["target"] = round_state(pred.target);
  j["gate_set"] = gs.fingerprint();
  j["mode"] = to_string(opts.mode);
  j["budget"] = opts.budget;
  j["grid"] = opts.dedup_grid;
  j["node_limit"] = opts.node_limit;
  if (opts.mode == SearchMode::heuristic_layers) {
    j["seed"] = opts.seed;
    j["max_layers"] = opts.max_layers;
    j["restarts"] = opts.restarts;
    j["opt_iterations"] = opts.opt_iterations;
    j["beam_width"] = opts.beam_width;
    j["beam_depth"] = opts.beam_depth;
  }
  std::string fp = j.dump();
  if (fingerprint) *fingerprint = fp;

  std::uint64_t h1 = 0xcbf29ce484222325ULL;
  std::uint64_t h2 = 0x9ae16a3b2f90404fULL;
  for (unsigned char c : fp) {
    h1 = (h1 ^ c) * 0x100000001b3ULL;
    h2 = splitmix64(h2 ^ c);
  }
  std::ostringstream key;
  key << std::hex << h1 << "-" << h2;
  return key.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace branchlab
