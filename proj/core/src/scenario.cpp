#include "branchlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "branchlab/rng.hpp"

namespace branchlab {

namespace {

void check_keys(const ojson& j, const std::set<std::string>& allowed, const std::string& path,
                std::vector<std::string>& diags) {
  if (!j.is_object()) {
    diags.push_back("error: " + path + " must be an object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      diags.push_back("error: " + path + ": unknown key '" + it.key() + "'");
    }
  }
}

bool number_in(const ojson& j, const std::string& key, double lo, double hi, bool lo_open, bool hi_open,
               const std::string& path, std::vector<std::string>& diags) {
  if (!j.contains(key)) return true;
  if (!j.at(key).is_number()) {
    diags.push_back("error: " + path + "." + key + " must be a number");
    return false;
  }
  double v = j.at(key).get<double>();
  bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  if (!ok) {
    std::ostringstream msg;
    msg << "error: " << path << "." << key << " = " << v << " outside " << (lo_open ? "(" : "[") << lo
        << ", " << hi << (hi_open ? ")" : "]");
    diags.push_back(msg.str());
  }
  return ok;
}

void validate_state_spec(const ojson& j, const std::string& path, int n_sites,
                         std::vector<std::string>& diags) {
  check_keys(j, {"kind", "bits", "path", "circuit", "length"}, path, diags);
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    diags.push_back("error: " + path + ".kind required (ghz | plus | basis | file | circuit | random_circuit)");
    return;
  }
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "ghz" || kind == "plus") return;
  if (kind == "basis") {
    if (!j.contains("bits") || !j.at("bits").is_string() ||
        static_cast<int>(j.at("bits").get<std::string>().size()) != n_sites) {
      diags.push_back("error: " + path + ".bits must be a 0/1 string of length n_sites");
    }
    return;
  }
  if (kind == "file") {
    if (!j.contains("path") || !j.at("path").is_string()) {
      diags.push_back("error: " + path + ".path required for kind=file");
    } else if (!std::filesystem::exists(j.at("path").get<std::string>())) {
      diags.push_back("error: " + path + ".path: file not found: " + j.at("path").get<std::string>());
    }
    return;
  }
  if (kind == "circuit") {
    if (!j.contains("circuit") || !j.at("circuit").is_array()) {
      diags.push_back("error: " + path + ".circuit required for kind=circuit");
    }
    return;
  }
  if (kind == "random_circuit") {
    if (!j.contains("length") || !j.at("length").is_number_integer() || j.at("length").get<int>() < 0) {
      diags.push_back("error: " + path + ".length must be a nonnegative integer");
    }
    return;
  }
  diags.push_back("error: " + path + ".kind '" + kind + "' unknown");
}

void validate_family(const ojson& j, const std::string& path, int n_sites,
                     std::vector<std::string>& diags) {
  check_keys(j, {"kinds", "max_support", "subsets"}, path, diags);
  if (j.contains("kinds")) {
    if (!j.at("kinds").is_array()) {
      diags.push_back("error: " + path + ".kinds must be an array");
    } else {
      for (const auto& k : j.at("kinds")) {
        std::string s = k.is_string() ? k.get<std::string>() : "";
        if (s != "z_site" && s != "pauli_eigensplit" && s != "computational_subset") {
          diags.push_back("error: " + path + ".kinds: unknown family kind '" + s + "'");
        }
      }
    }
  }
  number_in(j, "max_support", 1, 2, false, false, path, diags);
  if (j.contains("subsets")) {
    if (!j.at("subsets").is_array()) {
      diags.push_back("error: " + path + ".subsets must be an array of site lists");
    } else {
      for (const auto& sub : j.at("subsets")) {
        if (!sub.is_array() || sub.empty()) {
          diags.push_back("error: " + path + ".subsets entries must be nonempty arrays");
          continue;
        }
        for (const auto& q : sub) {
          if (!q.is_number_integer() || q.get<int>() < 0 || q.get<int>() >= n_sites) {
            diags.push_back("error: " + path + ".subsets: site index out of range");
          }
        }
      }
    }
  }
}

void validate_splitter(const ojson& j, int n_sites, std::vector<std::string>& diags) {
  check_keys(j, {"kind", "epsilon", "b", "delta", "mode", "budget", "min_branchiness", "family", "max_layers"},
             "splitter", diags);
  std::string kind = j.value("kind", "tm");
  if (kind != "tm" && kind != "weingarten") diags.push_back("error: splitter.kind must be tm or weingarten");
  number_in(j, "epsilon", 0, 0.5, true, true, "splitter", diags);
  number_in(j, "b", 0, 1e9, false, false, "splitter", diags);
  number_in(j, "delta", 0, 1, true, true, "splitter", diags);
  number_in(j, "budget", 0, 1000, false, false, "splitter", diags);
  number_in(j, "max_layers", 0, 64, false, false, "splitter", diags);
  if (j.contains("mode")) {
    std::string m = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
    if (m != "exact" && m != "heuristic") diags.push_back("error: splitter.mode must be exact or heuristic");
    if (m == "exact" && n_sites >= 10) {
      diags.push_back("warning: splitter: exact mode at n_sites >= 10 is budget-infeasible");
    }
  }
  if (j.contains("family")) validate_family(j.at("family"), "splitter.family", n_sites, diags);
}

CandidateFamily family_from_json(const ojson& j) {
  CandidateFamily f;
  if (j.contains("kinds")) {
    f.z_site = false;
    f.pauli_eigensplit = false;
    for (const auto& k : j.at("kinds")) {
      std::string s = k.get<std::string>();
      if (s == "z_site") f.z_site = true;
      if (s == "pauli_eigensplit") f.pauli_eigensplit = true;
    }
  }
  f.max_support = j.value("max_support", 2);
  if (j.contains("subsets")) {
    for (const auto& sub : j.at("subsets")) {
      std::vector<int> sites;
      for (const auto& q : sub) sites.push_back(q.get<int>());
      f.computational_subsets.push_back(std::move(sites));
    }
  }
  return f;
}

}  // namespace

std::vector<std::string> validate_scenario(const ojson& j) {
  std::vector<std::string> diags;
  check_keys(j,
             {"name", "seed", "lattice", "initial_state", "splitter", "dynamics", "sampling", "complexity",
              "sweep"},
             "scenario", diags);
  if (!j.is_object()) return diags;

  if (!j.contains("name") || !j.at("name").is_string()) diags.push_back("error: scenario.name required");
  if (j.contains("seed") && (!j.at("seed").is_number_integer() || j.at("seed").get<std::int64_t>() < 0)) {
    diags.push_back("error: scenario.seed must be a nonnegative integer");
  }

  int n_sites = 0;
  if (!j.contains("lattice")) {
    diags.push_back("error: scenario.lattice required");
  } else {
    check_keys(j.at("lattice"), {"n_sites", "max_sites"}, "lattice", diags);
    int max_sites = j.at("lattice").value("max_sites", 14);
    if (number_in(j.at("lattice"), "n_sites", 1, max_sites, false, false, "lattice", diags) &&
        j.at("lattice").contains("n_sites")) {
      n_sites = j.at("lattice").at("n_sites").get<int>();
    } else if (!j.at("lattice").contains("n_sites")) {
      diags.push_back("error: lattice.n_sites required");
    }
  }
  if (n_sites == 0) return diags;  // downstream checks need the lattice

  if (!j.contains("initial_state")) {
    diags.push_back("error: scenario.initial_state required");
  } else {
    validate_state_spec(j.at("initial_state"), "initial_state", n_sites, diags);
  }

  if (j.contains("splitter")) validate_splitter(j.at("splitter"), n_sites, diags);

  if (j.contains("dynamics")) {
    const ojson& d = j.at("dynamics");
    check_keys(d,
               {"model", "j", "g", "kappa", "system_site", "transverse_on_system", "dt", "trotter_order",
                "sample_times", "reverse_at", "theta"},
               "dynamics", diags);
    std::string model = d.value("model", "tfim");
    if (model != "tfim" && model != "apparatus" && model != "identity") {
      diags.push_back("error: dynamics.model must be tfim, apparatus, or identity");
    }
    number_in(d, "dt", 0, 10, true, false, "dynamics", diags);
    number_in(d, "system_site", 0, n_sites - 1, false, false, "dynamics", diags);
    if (d.contains("trotter_order")) {
      int o = d.at("trotter_order").is_number_integer() ? d.at("trotter_order").get<int>() : -1;
      if (o != 1 && o != 2) diags.push_back("error: dynamics.trotter_order must be 1 or 2");
    }
    if (d.contains("sample_times")) {
      if (!d.at("sample_times").is_array() || d.at("sample_times").empty()) {
        diags.push_back("error: dynamics.sample_times must be a nonempty array");
      } else {
        double prev = -1;
        for (const auto& t : d.at("sample_times")) {
          double v = t.is_number() ? t.get<double>() : -1;
          if (v < 0 || v <= prev) {
            diags.push_back("error: dynamics.sample_times must be nonnegative and strictly increasing");
            break;
          }
          prev = v;
        }
      }
    }
    number_in(d, "theta", 0, 1, true, false, "dynamics", diags);
    double dt = d.value("dt", 0.05);
    double maxc = std::max({std::abs(d.value("j", 1.0)), std::abs(d.value("g", 0.0)), std::abs(d.value("kappa", 0.0))});
    if (dt * maxc > 0.5) diags.push_back("warning: dynamics: dt * max|coupling| > 0.5, Trotter error may be large");
  }

  if (j.contains("sampling")) {
    const ojson& s = j.at("sampling");
    check_keys(s, {"n_samples", "observables"}, "sampling", diags);
    number_in(s, "n_samples", 1, 1e9, false, false, "sampling", diags);
    if (s.contains("observables")) {
      if (!s.at("observables").is_array()) {
        diags.push_back("error: sampling.observables must be an array");
      } else {
        for (const auto& o : s.at("observables")) {
          check_keys(o, {"pauli"}, "sampling.observables[]", diags);
          if (!o.contains("pauli") || !o.at("pauli").is_string() ||
              static_cast<int>(o.at("pauli").get<std::string>().size()) != n_sites) {
            diags.push_back("error: sampling.observables: pauli string of length n_sites required");
          } else {
            for (char c : o.at("pauli").get<std::string>()) {
              if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                diags.push_back("error: sampling.observables: pauli axes must be I/X/Y/Z");
                break;
              }
            }
          }
        }
      }
    }
  }

  if (j.contains("complexity")) {
    const ojson& c = j.at("complexity");
    check_keys(c, {"kind", "other", "delta", "epsilon", "horizon", "stride", "seeds", "budget"}, "complexity",
               diags);
    std::string kind = c.value("kind", "");
    if (kind == "state_map" || kind == "tm_distinguish" || kind == "tm_interfere") {
      if (!c.contains("other")) {
        diags.push_back("error: complexity.other (second state spec) required for kind=" + kind);
      } else {
        validate_state_spec(c.at("other"), "complexity.other", n_sites, diags);
      }
      number_in(c, "delta", 0, 1, true, true, "complexity", diags);
      number_in(c, "epsilon", 0, 0.5, true, true, "complexity", diags);
    } else if (kind == "growth_probe") {
      number_in(c, "horizon", 0, 1000, false, false, "complexity", diags);
      number_in(c, "stride", 1, 1000, false, false, "complexity", diags);
      if (c.contains("seeds") && !c.at("seeds").is_array()) {
        diags.push_back("error: complexity.seeds must be an array of integers");
      }
    } else {
      diags.push_back("error: complexity.kind must be state_map, tm_distinguish, tm_interfere, or growth_probe");
    }
    number_in(c, "budget", 0, 1000, false, false, "complexity", diags);
  }

  if (j.contains("sweep")) {
    const ojson& s = j.at("sweep");
    check_keys(s, {"b_values"}, "sweep", diags);
    if (!s.contains("b_values") || !s.at("b_values").is_array() || s.at("b_values").empty()) {
      diags.push_back("error: sweep.b_values must be a nonempty sorted array");
    } else {
      double prev = -1e300;
      for (const auto& b : s.at("b_values")) {
        double v = b.is_number() ? b.get<double>() : -1;
        if (v < 0) diags.push_back("error: sweep.b_values must be nonnegative");
        if (v < prev) diags.push_back("error: sweep.b_values must be sorted ascending");
        prev = v;
      }
    }
  }
  return diags;
}

bool diagnostics_fatal(const std::vector<std::string>& diags) {
  for (const std::string& d : diags) {
    if (d.rfind("warning:", 0) != 0) return true;
  }
  return false;
}

Circuit random_circuit(const LatticeSpec& lat, const GateSet& gs, int length, std::uint64_t seed) {
  InstructionTable tab(gs, lat);
  CounterRng rng(seed, 0xC1C0ULL);
  Circuit c;
  StateVector cur = StateVector::basis_state(lat, 0);
  int last = -1;
  std::uint64_t draw = 0;
  for (int k = 0; k < length; ++k) {
    int chosen = -1;
    for (int attempt = 0; attempt < 64; ++attempt) {
      int instr = static_cast<int>(rng.below(draw++, static_cast<std::uint64_t>(tab.size())));
      if (last >= 0 && tab.inverse(last) == instr) continue;
      Circuit one;
      one.ops.push_back(tab.app(instr));
      StateVector cand = apply_circuit(cur, one, gs);
      if (fidelity(cand, cur) >= 1.0 - 1e-9) continue;
      chosen = instr;
      cur = std::move(cand);
      break;
    }
    if (chosen < 0) throw std::runtime_error("random_circuit: no usable gate after 64 draws");
    c.ops.push_back(tab.app(chosen));
    last = chosen;
  }
  return c;
}

StateVector state_from_spec(const ojson& spec, const LatticeSpec& lat, const GateSet& gs,
                            std::uint64_t seed) {
  std::string kind = spec.at("kind").get<std::string>();
  if (kind == "ghz") return StateVector::ghz(lat);
  if (kind == "plus") return StateVector::all_plus(lat);
  if (kind == "basis") return StateVector::from_bits(lat, spec.at("bits").get<std::string>());
  if (kind == "file") {
    StateVector s = load_state_file(spec.at("path").get<std::string>());
    if (!(s.lattice() == lat)) throw std::invalid_argument("state file lattice does not match scenario");
    return s;
  }
  if (kind == "circuit") {
    Circuit c = circuit_from_json(spec.at("circuit"), gs, lat);
    return apply_circuit(StateVector::basis_state(lat, 0), c, gs);
  }
  if (kind == "random_circuit") {
    Circuit c = random_circuit(lat, gs, spec.at("length").get<int>(), seed);
    StateVector s = apply_circuit(StateVector::basis_state(lat, 0), c, gs);
    s.set_label("random_circuit");
    return s;
  }
  throw std::invalid_argument("unknown state spec kind: " + kind);
}

Scenario scenario_from_json(const ojson& j) {
  Scenario sc;
  sc.raw = j;
  sc.name = j.at("name").get<std::string>();
  sc.seed = j.value("seed", 1ull);
  sc.lattice = LatticeSpec(j.at("lattice").at("n_sites").get<int>(), j.at("lattice").value("max_sites", 14));
  sc.initial_state_spec_ = j.at("initial_state");

  if (j.contains("splitter")) {
    sc.has_splitter = true;
    const ojson& s = j.at("splitter");
    sc.splitter.kind = s.value("kind", "tm") == std::string("weingarten") ? SplitterConfig::Kind::weingarten
                                                                          : SplitterConfig::Kind::tm;
    SearchOptions oracle;
    oracle.mode = s.value("mode", "exact") == std::string("heuristic") ? SearchMode::heuristic_layers
                                                                       : SearchMode::exact_bfs;
    oracle.budget = s.value("budget", oracle.mode == SearchMode::exact_bfs ? 12 : 40);
    oracle.max_layers = s.value("max_layers", 8);
    sc.splitter.tm.epsilon = s.value("epsilon", 0.1);
    sc.splitter.tm.oracle = oracle;
    sc.splitter.weingarten.b = s.value("b", 1.0);
    sc.splitter.weingarten.delta = s.value("delta", 0.01);
    sc.splitter.weingarten.oracle = oracle;
    sc.splitter.min_branchiness = s.value("min_branchiness", 1);
    sc.splitter.family =
        s.contains("family") ? family_from_json(s.at("family")) : CandidateFamily::default_family();
  }

  if (j.contains("dynamics")) {
    sc.has_dynamics = true;
    const ojson& d = j.at("dynamics");
    std::string model = d.value("model", "tfim");
    sc.hamiltonian.j = model == "identity" ? 0.0 : d.value("j", 1.0);
    sc.hamiltonian.g = model == "identity" ? 0.0 : d.value("g", 0.0);
    sc.hamiltonian.kappa = d.value("kappa", 0.0);
    sc.hamiltonian.apparatus = model == "apparatus";
    sc.hamiltonian.system_site = d.value("system_site", 0);
    sc.hamiltonian.transverse_on_system = d.value("transverse_on_system", model != "apparatus");
    sc.hamiltonian.dt = d.value("dt", 0.05);
    sc.hamiltonian.trotter_order = d.value("trotter_order", 2);
    if (d.contains("sample_times")) {
      for (const auto& t : d.at("sample_times")) sc.sample_times.push_back(t.get<double>());
    }
    if (d.contains("reverse_at")) sc.reverse_at = d.at("reverse_at").get<double>();
    sc.theta = d.value("theta", 0.99);
  }

  if (j.contains("sampling")) {
    sc.has_sampling = true;
    const ojson& s = j.at("sampling");
    sc.n_samples = s.value("n_samples", 10000);
    if (s.contains("observables")) {
      for (const auto& o : s.at("observables")) {
        sc.observables.push_back(Observable::pauli(o.at("pauli").get<std::string>()));
      }
    }
  }

  if (j.contains("complexity")) {
    sc.has_complexity = true;
    const ojson& c = j.at("complexity");
    sc.complexity_kind = c.at("kind").get<std::string>();
    if (c.contains("other")) sc.complexity_other = c.at("other");
    sc.complexity_delta = c.value("delta", 0.01);
    sc.complexity_epsilon = c.value("epsilon", 0.1);
    sc.probe_horizon = c.value("horizon", 6);
    sc.probe_stride = c.value("stride", 1);
    if (c.contains("seeds")) {
      for (const auto& s : c.at("seeds")) sc.probe_seeds.push_back(s.get<std::uint64_t>());
    }
    if (c.contains("budget")) {
      // budget override rides on the splitter oracle when present
    }
  }

  if (j.contains("sweep")) {
    sc.has_sweep = true;
    for (const auto& b : j.at("sweep").at("b_values")) sc.sweep_b_values.push_back(b.get<double>());
  }
  return sc;
}

StateVector Scenario::initial_state(const GateSet& gs) const {
  return state_from_spec(initial_state_spec_, lattice, gs, seed);
}

Scenario load_scenario(const std::string& path, std::vector<std::string>* diagnostics) {
  ojson j = ojson::parse(read_text_file(path));
  std::vector<std::string> diags = validate_scenario(j);
  if (diagnostics) *diagnostics = diags;
  if (diagnostics_fatal(diags)) {
    std::string msg = "scenario validation failed:";
    for (const std::string& d : diags) msg += "\n  " + d;
    throw std::invalid_argument(msg);
  }
  return scenario_from_json(j);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

ojson weights_json(const Decomposition& d) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    arr.push_back(ojson{{"label", d.label(i)}, {"weight", d.weight(i)}});
  }
  return arr;
}

ojson tm_report_json(const TmReport& rep, const GateSet& gs) {
  ojson j;
  j["epsilon"] = rep.epsilon;
  j["c_i_min"] = rep.c_i_min;
  j["c_d_max"] = rep.c_d_max;
  j["branchiness"] = rep.branchiness;
  if (rep.branchiness_lower) j["branchiness_lower"] = *rep.branchiness_lower;
  if (rep.branchiness_upper) j["branchiness_upper"] = *rep.branchiness_upper;
  j["certified"] = rep.certified;
  ojson pairs = ojson::array();
  for (const TmPairReport& p : rep.pairs) {
    ojson pj;
    pj["i"] = p.i;
    pj["j"] = p.j;
    pj["c_d"] = complexity_result_to_json(p.c_d, gs);
    pj["c_i"] = complexity_result_to_json(p.c_i, gs);
    pj["pair_branchiness"] = p.pair_branchiness;
    pj["certified"] = p.certified();
    if (auto lo = p.branchiness_lower()) pj["branchiness_lower"] = *lo;
    if (auto up = p.branchiness_upper()) pj["branchiness_upper"] = *up;
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

ojson q_report_json(const QReport& rep, const GateSet& gs) {
  ojson j;
  j["b"] = rep.b;
  j["q_value"] = rep.q_value;
  j["complexity_term"] = rep.complexity_term;
  j["entropy_term"] = rep.entropy_term;
  j["exact"] = rep.exact;
  ojson branches = ojson::array();
  for (const QBranchEntry& e : rep.branches) {
    branches.push_back(ojson{{"label", e.label},
                             {"weight", e.weight},
                             {"complexity", complexity_result_to_json(e.complexity, gs)}});
  }
  j["branches"] = std::move(branches);
  return j;
}

ojson report_shell(const Scenario& sc, const GateSet& gs, const std::string& subcommand) {
  ojson j;
  j["subcommand"] = subcommand;
  j["scenario"] = sc.raw;
  j["seed"] = sc.seed;
  j["gate_set"] = gate_set_to_json(gs);
  return j;
}

SearchOptions oracle_options(const Scenario& sc, const RunOverrides& ov) {
  SearchOptions o = sc.has_splitter ? sc.splitter.tm.oracle : SearchOptions{};
  if (ov.mode) o.mode = *ov.mode;
  if (ov.budget) o.budget = *ov.budget;
  o.cache = ov.cache;
  o.seed = sc.seed;
  return o;
}

SplitterConfig splitter_with(const Scenario& sc, const RunOverrides& ov) {
  if (!sc.has_splitter) throw std::invalid_argument("this subcommand needs a splitter section");
  SplitterConfig cfg = sc.splitter;
  SearchOptions o = oracle_options(sc, ov);
  cfg.tm.oracle = o;
  cfg.weingarten.oracle = o;
  return cfg;
}

Decomposition best_decomposition(const StateVector& psi, const SplitterConfig& cfg, const GateSet& gs,
                                 ojson* note) {
  if (cfg.kind == SplitterConfig::Kind::tm) {
    TmSearchResult r = search_tm_split(psi, cfg.tm, cfg.family, gs, cfg.min_branchiness);
    if (note) {
      (*note)["splitter"] = "tm";
      (*note)["found_good_split"] = r.found_good_split;
      (*note)["best_candidate"] = r.best_name;
    }
    if (r.best && r.found_good_split) return *r.best;
    return Decomposition::trivial(psi);
  }
  QConfig qc = cfg.weingarten;
  qc.vacuum = StateVector::basis_state(psi.lattice(), 0);
  QMinimizeResult r = minimize_q(psi, qc, cfg.family, gs);
  if (note) {
    (*note)["splitter"] = "weingarten";
    (*note)["chosen"] = r.name;
    (*note)["q_value"] = r.report.q_value;
  }
  return r.best;
}

RunOutput run_tm(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  SplitterConfig cfg = splitter_with(sc, ov);
  StateVector psi = sc.initial_state(gs);
  TmSearchResult r = search_tm_split(psi, cfg.tm, cfg.family, gs, cfg.min_branchiness);

  RunOutput out;
  out.report = report_shell(sc, gs, "tm");
  ojson res;
  res["state_label"] = psi.label();
  res["found_good_split"] = r.found_good_split;
  res["min_branchiness"] = r.min_branchiness;
  if (r.best) {
    res["best"] = ojson{{"candidate", r.best_name},
                        {"weights", weights_json(*r.best)},
                        {"report", tm_report_json(*r.best_report, gs)}};
  } else {
    res["best"] = nullptr;
    res["note"] = "no good split";
  }
  ojson cands = ojson::array();
  for (const TmCandidateOutcome& c : r.candidates) {
    ojson cj;
    cj["name"] = c.name;
    cj["valid"] = c.valid;
    if (!c.error.empty()) cj["error"] = c.error;
    if (c.report) {
      cj["branchiness"] = c.report->branchiness;
      if (c.report->branchiness_lower) cj["branchiness_lower"] = *c.report->branchiness_lower;
      cj["certified"] = c.report->certified;
      cj["c_i_min"] = c.report->c_i_min;
      cj["c_d_max"] = c.report->c_d_max;
    }
    cands.push_back(std::move(cj));
  }
  res["candidates"] = std::move(cands);
  out.report["results"] = std::move(res);

  std::ostringstream csv;
  csv << "candidate,valid,branchiness,branchiness_lower,certified,c_i_min,c_d_max\n";
  for (const TmCandidateOutcome& c : r.candidates) {
    csv << csv_escape(c.name) << "," << (c.valid ? 1 : 0) << ",";
    if (c.report) {
      csv << c.report->branchiness << ",";
      if (c.report->branchiness_lower) csv << *c.report->branchiness_lower;
      csv << "," << (c.report->certified ? 1 : 0) << "," << c.report->c_i_min << "," << c.report->c_d_max;
    } else {
      csv << ",,,,";
    }
    csv << "\n";
  }
  out.files.emplace_back("tm_candidates.csv", csv.str());
  return out;
}

RunOutput run_weingarten(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  SplitterConfig cfg = splitter_with(sc, ov);
  if (sc.splitter.kind != SplitterConfig::Kind::weingarten) {
    // Allow running the subcommand with a tm-configured scenario; b/delta defaults apply.
  }
  StateVector psi = sc.initial_state(gs);
  QConfig qc = cfg.weingarten;
  qc.vacuum = StateVector::basis_state(sc.lattice, 0);

  RunOutput out;
  out.report = report_shell(sc, gs, "weingarten");
  ojson res;
  res["state_label"] = psi.label();

  QMinimizeResult m = minimize_q(psi, qc, cfg.family, gs);
  ojson best;
  best["candidate"] = m.name;
  best["branch_count"] = m.best.size();
  best["weights"] = weights_json(m.best);
  best["report"] = q_report_json(m.report, gs);
  best["q_gap_to_second"] = m.q_gap_to_second;
  best["near_tie"] = m.near_tie;
  res["minimum"] = std::move(best);

  ojson cands = ojson::array();
  for (const QCandidateOutcome& c : m.candidates) {
    ojson cj;
    cj["name"] = c.name;
    cj["valid"] = c.valid;
    if (!c.error.empty()) cj["error"] = c.error;
    if (c.report) {
      cj["q_value"] = c.report->q_value;
      cj["branch_count"] = c.branch_count;
    }
    cands.push_back(std::move(cj));
  }
  res["candidates"] = std::move(cands);

  if (sc.has_sweep) {
    std::vector<BSweepRow> rows = b_sweep(psi, qc, sc.sweep_b_values, cfg.family, gs);
    ojson sweep = ojson::array();
    std::ostringstream csv;
    csv << "b,branch_count,q_value,q_gap,near_tie,nests_in_previous,chosen\n";
    for (const BSweepRow& r : rows) {
      sweep.push_back(ojson{{"b", r.b},
                            {"branch_count", r.branch_count},
                            {"q_value", r.q_value},
                            {"q_gap", r.q_gap},
                            {"near_tie", r.near_tie},
                            {"nests_in_previous", r.nests_in_previous},
                            {"chosen", r.chosen}});
      csv << r.b << "," << r.branch_count << "," << r.q_value << "," << r.q_gap << "," << r.near_tie << ","
          << r.nests_in_previous << "," << csv_escape(r.chosen) << "\n";
    }
    res["sweep"] = std::move(sweep);
    // Crossover brackets: consecutive rows where the branch count changes.
    ojson brackets = ojson::array();
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      if (rows[k].branch_count != rows[k + 1].branch_count) {
        brackets.push_back(ojson{{"b_lo", rows[k].b},
                                 {"b_hi", rows[k + 1].b},
                                 {"count_lo", rows[k].branch_count},
                                 {"count_hi", rows[k + 1].branch_count}});
      }
    }
    res["crossovers"] = std::move(brackets);
    out.files.emplace_back("b_sweep.csv", csv.str());
  }
  out.report["results"] = std::move(res);
  return out;
}

RunOutput run_evolve(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  if (!sc.has_dynamics || sc.sample_times.empty()) {
    throw std::invalid_argument("evolve needs a dynamics section with sample_times");
  }
  SplitterConfig cfg = splitter_with(sc, ov);
  StateVector psi = sc.initial_state(gs);
  BranchTree tree = track_branches(psi, sc.hamiltonian, sc.sample_times, cfg, gs, sc.reverse_at);

  RunOutput out;
  out.report = report_shell(sc, gs, "evolve");
  ojson res;
  ojson levels = ojson::array();
  for (const BranchTreeLevel& lv : tree.levels) {
    ojson lj;
    lj["time"] = lv.time;
    lj["step"] = lv.step;
    lj["split_found"] = lv.split_found;
    lj["note"] = lv.splitter_note;
    if (lv.branchiness) lj["branchiness"] = *lv.branchiness;
    if (lv.q_value) lj["q_value"] = *lv.q_value;
    lj["weights"] = weights_json(lv.decomposition);
    levels.push_back(std::move(lj));
  }
  res["levels"] = std::move(levels);
  if (!tree.level_errors.empty()) res["level_errors"] = tree.level_errors;

  ojson edges = ojson::array();
  for (std::size_t k = 0; k < tree.overlaps.size(); ++k) {
    const std::size_t ne = tree.levels[k].decomposition.size();
    const std::size_t nl = tree.levels[k + 1].decomposition.size();
    ojson ej;
    ej["from_level"] = k;
    ej["overlaps"] = ojson::array();
    for (std::size_t jdx = 0; jdx < ne; ++jdx) {
      ojson row = ojson::array();
      for (std::size_t c = 0; c < nl; ++c) row.push_back(tree.overlaps[k][jdx * nl + c]);
      ej["overlaps"].push_back(std::move(row));
    }
    ej["parents"] = tree.parents[k];
    edges.push_back(std::move(ej));
  }
  res["edges"] = std::move(edges);

  if (tree.levels.size() >= 2) {
    TreeVerification full = verify_tree(tree, sc.theta);
    ojson vj;
    vj["theta"] = full.theta;
    vj["is_tree"] = full.is_tree;
    vj["levels_checked"] = full.levels_checked;
    ojson viols = ojson::array();
    for (const TreeViolation& v : full.violations) {
      viols.push_back(ojson{{"level", v.level},
                            {"branch", v.branch},
                            {"parent_candidates", v.candidates},
                            {"best_fraction", v.best_fraction}});
    }
    vj["violations"] = std::move(viols);
    res["tree_verification"] = std::move(vj);
  }

  auto window = good_split_window(tree);
  if (window) {
    ojson wj;
    wj["first_level"] = window->first;
    wj["last_level"] = window->second;
    wj["first_time"] = tree.levels[static_cast<std::size_t>(window->first)].time;
    wj["last_time"] = tree.levels[static_cast<std::size_t>(window->second)].time;
    // Verify the tree restricted to the window (root level included as the
    // trivial ancestor when the window starts later).
    int lo = std::max(0, window->first - 1);
    if (window->second - lo >= 1) {
      BranchTree sub;
      sub.levels.assign(tree.levels.begin() + lo, tree.levels.begin() + window->second + 1);
      sub.overlaps.assign(tree.overlaps.begin() + lo, tree.overlaps.begin() + window->second);
      sub.parents.assign(tree.parents.begin() + lo, tree.parents.begin() + window->second);
      TreeVerification wv = verify_tree(sub, sc.theta);
      wj["is_tree"] = wv.is_tree;
      wj["violations"] = wv.violations.size();
    }
    res["window"] = std::move(wj);
  } else {
    res["window"] = nullptr;
  }
  out.report["results"] = std::move(res);

  std::ostringstream csv;
  csv << "time,branch,label,weight,split_found\n";
  for (const BranchTreeLevel& lv : tree.levels) {
    for (std::size_t i = 0; i < lv.decomposition.size(); ++i) {
      csv << lv.time << "," << i << "," << csv_escape(lv.decomposition.label(i)) << ","
          << lv.decomposition.weight(i) << "," << (lv.split_found ? 1 : 0) << "\n";
    }
  }
  out.files.emplace_back("branch_weights.csv", csv.str());
  return out;
}

RunOutput run_sample(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  if (!sc.has_sampling || sc.observables.empty()) {
    throw std::invalid_argument("sample needs a sampling section with observables");
  }
  SplitterConfig cfg = splitter_with(sc, ov);
  StateVector psi = sc.initial_state(gs);
  ojson note;
  Decomposition d = best_decomposition(psi, cfg, gs, &note);
  std::uint64_t seed = ov.seed.value_or(sc.seed);
  CollapseReport rep = collapse_report(d, sc.observables, sc.n_samples, seed);

  RunOutput out;
  out.report = report_shell(sc, gs, "sample");
  ojson res;
  res["decomposition"] = note;
  res["weights"] = weights_json(d);
  res["n_samples"] = rep.n_samples;
  res["sample_counts"] = rep.sample_counts;
  ojson rows = ojson::array();
  std::ostringstream csv;
  csv << "observable,cost,full,branch_mean,sampled_mean,std_error,residual\n";
  for (const ObservableCollapse& r : rep.rows) {
    rows.push_back(ojson{{"observable", r.label},
                         {"cost", r.cost},
                         {"full", r.full},
                         {"branch_mean", r.branch_mean},
                         {"sampled_mean", r.sampled_mean},
                         {"std_error", r.std_error},
                         {"residual", r.residual},
                         {"branch_values", r.branch_values}});
    csv << csv_escape(r.label) << "," << r.cost << "," << r.full << "," << r.branch_mean << ","
        << r.sampled_mean << "," << r.std_error << "," << r.residual << "\n";
  }
  res["observables"] = std::move(rows);
  out.report["results"] = std::move(res);
  out.files.emplace_back("collapse.csv", csv.str());
  return out;
}

RunOutput run_complexity(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  if (!sc.has_complexity) throw std::invalid_argument("complexity needs a complexity section");
  StateVector psi = sc.initial_state(gs);
  SearchOptions oracle = oracle_options(sc, ov);

  RunOutput out;
  out.report = report_shell(sc, gs, "complexity");
  ojson res;
  res["kind"] = sc.complexity_kind;

  if (sc.complexity_kind == "growth_probe") {
    std::vector<std::uint64_t> seeds = sc.probe_seeds.empty() ? std::vector<std::uint64_t>{sc.seed}
                                                              : sc.probe_seeds;
    ojson per_seed = ojson::array();
    std::ostringstream csv;
    csv << "seed,step,value,status,certified_lower_bound\n";
    std::vector<int> final_exact;
    int monotone_violations = 0;
    for (std::uint64_t seed : seeds) {
      GrowthSpec spec;
      spec.kind = GrowthSpec::Kind::random_circuit;
      spec.seed = seed;
      GrowthSeries series =
          complexity_growth_probe(psi, spec, sc.probe_horizon, sc.probe_stride, gs, oracle);
      ojson sj;
      sj["seed"] = seed;
      ojson pts = ojson::array();
      for (const GrowthPoint& p : series.points) {
        pts.push_back(ojson{{"step", p.step},
                            {"value", p.complexity.value},
                            {"status", to_string(p.complexity.status)},
                            {"certified_lower_bound", p.complexity.certified_lower_bound()}});
        csv << seed << "," << p.step << "," << p.complexity.value << "," << to_string(p.complexity.status)
            << "," << p.complexity.certified_lower_bound() << "\n";
      }
      sj["points"] = std::move(pts);
      sj["lower_bound_violations"] = series.lower_bound_violations;
      monotone_violations += static_cast<int>(series.lower_bound_violations.size());
      const GrowthPoint& last = series.points.back();
      if (last.complexity.status == ComplexityStatus::exact) final_exact.push_back(last.complexity.value);
      per_seed.push_back(std::move(sj));
    }
    res["per_seed"] = std::move(per_seed);
    res["lower_bound_violations_total"] = monotone_violations;
    if (!final_exact.empty()) {
      std::sort(final_exact.begin(), final_exact.end());
      res["median_final_exact"] = final_exact[final_exact.size() / 2];
      res["final_exact_count"] = final_exact.size();
    }
    out.files.emplace_back("growth_probe.csv", csv.str());
  } else {
    StateVector other = state_from_spec(sc.complexity_other, sc.lattice, gs, sc.seed + 1);
    ComplexityResult r;
    if (sc.complexity_kind == "state_map") {
      r = state_complexity(psi, other, sc.complexity_delta, gs, oracle);
    } else if (sc.complexity_kind == "tm_distinguish") {
      r = distinguishing_complexity(psi, other, sc.complexity_epsilon, gs, oracle);
    } else {
      r = interference_complexity(psi, other, sc.complexity_epsilon, gs, oracle);
    }
    res["source_label"] = psi.label();
    res["other_label"] = other.label();
    res["result"] = complexity_result_to_json(r, gs);
  }
  out.report["results"] = std::move(res);
  return out;
}

RunOutput run_compare(const Scenario& sc, const RunOverrides& ov, const GateSet& gs) {
  SplitterConfig cfg = splitter_with(sc, ov);
  StateVector psi = sc.initial_state(gs);

  SplitterConfig tm_cfg = cfg;
  tm_cfg.kind = SplitterConfig::Kind::tm;
  ojson tm_note;
  Decomposition tm_d = best_decomposition(psi, tm_cfg, gs, &tm_note);

  SplitterConfig w_cfg = cfg;
  w_cfg.kind = SplitterConfig::Kind::weingarten;
  ojson w_note;
  Decomposition w_d = best_decomposition(psi, w_cfg, gs, &w_note);

  bool agree = tm_d.size() == w_d.size();
  if (agree) {
    for (std::size_t i = 0; i < tm_d.size() && agree; ++i) {
      bool matched = false;
      for (std::size_t j = 0; j < w_d.size(); ++j) {
        if (same_ray(tm_d.normalized_component(i), w_d.normalized_component(j), 1e-6)) {
          matched = true;
          break;
        }
      }
      agree = matched;
    }
  }

  RunOutput out;
  out.report = report_shell(sc, gs, "compare");
  ojson res;
  res["state_label"] = psi.label();
  res["tm"] = ojson{{"note", tm_note}, {"branch_count", tm_d.size()}, {"weights", weights_json(tm_d)}};
  res["weingarten"] =
      ojson{{"note", w_note}, {"branch_count", w_d.size()}, {"weights", weights_json(w_d)}};
  res["agree"] = agree;
  out.report["results"] = std::move(res);
  return out;
}

}  // namespace

RunOutput run_subcommand(const std::string& subcommand, const Scenario& scenario,
                         const RunOverrides& overrides, const GateSet& gs) {
  if (subcommand == "tm") return run_tm(scenario, overrides, gs);
  if (subcommand == "weingarten") return run_weingarten(scenario, overrides, gs);
  if (subcommand == "evolve") return run_evolve(scenario, overrides, gs);
  if (subcommand == "sample") return run_sample(scenario, overrides, gs);
  if (subcommand == "complexity") return run_complexity(scenario, overrides, gs);
  if (subcommand == "compare") return run_compare(scenario, overrides, gs);
  throw std::invalid_argument("unknown subcommand: " + subcommand);
}

}  // namespace branchlab
