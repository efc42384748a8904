#include "branchlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "branchlab/rng.hpp"

namespace branchlab {

double HamiltonianSpec::max_coupling() const {
  double m = std::max(std::abs(j), std::abs(g));
  if (apparatus) m = std::max(m, std::abs(kappa));
  return m;
}

namespace {

// Diagonal ZZ phases: exp(-i dt H_zz) with
// H_zz = -j sum Z_q Z_{q+1} - kappa sum_{e != s} Z_s Z_e (apparatus only).
void apply_zz_phases(std::vector<cplx>& amps, int n_sites, const HamiltonianSpec& h, double dt) {
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    double e = 0;
    for (int q = 0; q + 1 < n_sites; ++q) {
      double zq = bit_of(i, q) ? -1.0 : 1.0;
      double zq1 = bit_of(i, q + 1) ? -1.0 : 1.0;
      e += -h.j * zq * zq1;
    }
    if (h.apparatus) {
      double zs = bit_of(i, h.system_site) ? -1.0 : 1.0;
      for (int q = 0; q < n_sites; ++q) {
        if (q == h.system_site) continue;
        double zq = bit_of(i, q) ? -1.0 : 1.0;
        e += -h.kappa * zs * zq;
      }
    }
    amps[i] *= std::polar(1.0, -dt * e);
  }
}

// exp(-i dt H_x) with H_x = -g sum X_q (optionally skipping the system site).
void apply_x_rotations(std::vector<cplx>& amps, int n_sites, const HamiltonianSpec& h, double dt) {
  if (h.g == 0) return;
  const double c = std::cos(h.g * dt);
  const cplx is{0, std::sin(h.g * dt)};  // exp(i g dt X) = cos I + i sin X
  Gate rot;
  rot.arity = 1;
  rot.m[0] = c;
  rot.m[1] = is;
  rot.m[2] = is;
  rot.m[3] = c;
  for (int q = 0; q < n_sites; ++q) {
    if (h.apparatus && !h.transverse_on_system && q == h.system_site) continue;
    apply_gate_inplace(amps, n_sites, rot, q, -1);
  }
}

void trotter_step(std::vector<cplx>& amps, int n_sites, const HamiltonianSpec& h, bool inverse) {
  const double dt = inverse ? -h.dt : h.dt;
  if (h.trotter_order == 2) {
    apply_x_rotations(amps, n_sites, h, dt / 2);
    apply_zz_phases(amps, n_sites, h, dt);
    apply_x_rotations(amps, n_sites, h, dt / 2);
  } else {
    // First order; the inverse reverses the factor order so that
    // step(inverse) really is step(forward)^-1.
    if (!inverse) {
      apply_zz_phases(amps, n_sites, h, dt);
      apply_x_rotations(amps, n_sites, h, dt);
    } else {
      apply_x_rotations(amps, n_sites, h, dt);
      apply_zz_phases(amps, n_sites, h, dt);
    }
  }
}

}  // namespace

StateVector trotter_evolve(const StateVector& state, const HamiltonianSpec& h, int steps, bool inverse,
                           std::string* warning) {
  if (h.dt <= 0) throw std::invalid_argument("trotter_evolve: dt must be > 0");
  if (h.trotter_order != 1 && h.trotter_order != 2) {
    throw std::invalid_argument("trotter_evolve: order must be 1 or 2");
  }
  if (steps < 0) throw std::invalid_argument("trotter_evolve: steps < 0");
  if (warning && h.dt * h.max_coupling() > 0.5) {
    *warning = "dt * max|coupling| > 0.5; Trotter error may be large";
  }
  std::vector<cplx> amps = state.amplitudes();
  for (int s = 0; s < steps; ++s) trotter_step(amps, state.lattice().n_sites, h, inverse);
  StateVector out(state.lattice(), std::move(amps));
  out.set_label(state.label());
  return out;
}

namespace {

Decomposition run_splitter(const StateVector& psi, const SplitterConfig& cfg, const GateSet& gs,
                           BranchTreeLevel& level) {
  if (cfg.kind == SplitterConfig::Kind::tm) {
    TmSearchResult r = search_tm_split(psi, cfg.tm, cfg.family, gs, cfg.min_branchiness);
    if (r.best && r.found_good_split) {
      level.split_found = true;
      level.branchiness = r.best_report->branchiness;
      level.splitter_note = r.best_name;
      return *r.best;
    }
    level.splitter_note = r.best ? "best split below branchiness threshold" : "no valid split";
    if (r.best_report && r.best_report->branchiness_lower) {
      level.branchiness = *r.best_report->branchiness_lower;
    }
    return Decomposition::trivial(psi);
  }
  QConfig qc = cfg.weingarten;
  qc.vacuum = StateVector::basis_state(psi.lattice(), 0);
  QMinimizeResult r = minimize_q(psi, qc, cfg.family, gs);
  level.q_value = r.report.q_value;
  level.splitter_note = r.name;
  level.split_found = r.best.size() >= 2;
  return r.best;
}

}  // namespace

BranchTree track_branches(const StateVector& psi0, const HamiltonianSpec& h,
                          const std::vector<double>& sample_times, const SplitterConfig& splitter,
                          const GateSet& gs, std::optional<double> reverse_at) {
  if (sample_times.empty()) throw std::invalid_argument("track_branches: no sample times");
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw std::invalid_argument("track_branches: sample times must increase");
  }

  // Integer step schedule, with an optional reversal point after which the
  // evolution applies exact step inverses (the recoherence construction).
  auto steps_of = [&](double t) { return static_cast<int>(std::llround(t / h.dt)); };
  int reverse_step = reverse_at ? steps_of(*reverse_at) : -1;

  auto evolve_segment = [&](const StateVector& s, int from, int to) {
    if (reverse_step < 0 || to <= reverse_step) return trotter_evolve(s, h, to - from);
    if (from >= reverse_step) return trotter_evolve(s, h, to - from, true);
    StateVector mid = trotter_evolve(s, h, reverse_step - from);
    return trotter_evolve(mid, h, to - reverse_step, true);
  };

  BranchTree tree;
  StateVector cur = psi0;
  int cur_step = 0;
  for (double t : sample_times) {
    int step = steps_of(t);
    cur = evolve_segment(cur, cur_step, step);
    cur_step = step;
    BranchTreeLevel level;
    level.time = t;
    level.step = step;
    try {
      level.decomposition = run_splitter(cur.normalized(), splitter, gs, level);
    } catch (const std::exception& e) {
      tree.level_errors.push_back(std::string("t=") + std::to_string(t) + ": " + e.what());
      continue;
    }
    tree.levels.push_back(std::move(level));
  }

  // Overlap matrices between consecutive levels.
  for (std::size_t k = 0; k + 1 < tree.levels.size(); ++k) {
    const BranchTreeLevel& earlier = tree.levels[k];
    const BranchTreeLevel& later = tree.levels[k + 1];
    const std::size_t ne = earlier.decomposition.size();
    const std::size_t nl = later.decomposition.size();
    std::vector<double> o(ne * nl, 0.0);
    for (std::size_t j = 0; j < ne; ++j) {
      StateVector fwd = evolve_segment(earlier.decomposition.normalized_component(j), earlier.step, later.step);
      for (std::size_t c = 0; c < nl; ++c) {
        double amp = std::abs(inner_product(later.decomposition.normalized_component(c), fwd));
        o[j * nl + c] = amp * amp;
      }
    }
    std::vector<int> par(nl, -1);
    for (std::size_t c = 0; c < nl; ++c) {
      double best = -1;
      for (std::size_t j = 0; j < ne; ++j) {
        if (o[j * nl + c] > best) {
          best = o[j * nl + c];
          par[c] = static_cast<int>(j);
        }
      }
    }
    tree.overlaps.push_back(std::move(o));
    tree.parents.push_back(std::move(par));
  }
  return tree;
}

TreeVerification verify_tree(const BranchTree& tree, double theta) {
  if (tree.levels.size() < 2) throw std::invalid_argument("verify_tree: needs >= 2 levels");
  TreeVerification v;
  v.theta = theta;
  v.levels_checked = static_cast<int>(tree.levels.size()) - 1;
  for (std::size_t k = 0; k + 1 < tree.levels.size(); ++k) {
    const std::size_t ne = tree.levels[k].decomposition.size();
    const std::size_t nl = tree.levels[k + 1].decomposition.size();
    const std::vector<double>& o = tree.overlaps[k];
    for (std::size_t c = 0; c < nl; ++c) {
      double col_mass = 0;
      double best = 0;
      for (std::size_t j = 0; j < ne; ++j) {
        col_mass += o[j * nl + c];
        best = std::max(best, o[j * nl + c]);
      }
      int candidates = 0;
      if (col_mass > 0) {
        for (std::size_t j = 0; j < ne; ++j) {
          if (o[j * nl + c] >= theta * col_mass) ++candidates;
        }
      }
      if (candidates != 1) {
        TreeViolation viol;
        viol.level = static_cast<int>(k + 1);
        viol.branch = static_cast<int>(c);
        viol.candidates = candidates;
        viol.best_fraction = col_mass > 0 ? best / col_mass : 0;
        v.violations.push_back(viol);
      }
    }
  }
  v.is_tree = v.violations.empty();
  return v;
}

std::optional<std::pair<int, int>> good_split_window(const BranchTree& tree) {
  int first = -1, last = -1;
  for (std::size_t k = 0; k < tree.levels.size(); ++k) {
    if (tree.levels[k].split_found) {
      if (first < 0) first = static_cast<int>(k);
      last = static_cast<int>(k);
    } else if (first >= 0) {
      break;  // keep the first contiguous run
    }
  }
  if (first < 0) return std::nullopt;
  return std::make_pair(first, last);
}

GrowthSeries complexity_growth_probe(const StateVector& psi0, const GrowthSpec& evolution, int horizon,
                                     int stride, const GateSet& gs, const SearchOptions& oracle) {
  if (horizon < 0 || stride < 1) throw std::invalid_argument("complexity_growth_probe: bad horizon/stride");
  GrowthSeries series;
  InstructionTable tab(gs, psi0.lattice());
  CounterRng rng(evolution.seed, 0xC1C0ULL);

  StateVector cur = psi0;
  Circuit applied;
  int last_instr = -1;
  std::uint64_t draw = 0;

  auto record = [&](int step, double time) {
    GrowthPoint p;
    p.step = step;
    p.time = time;
    p.complexity = state_complexity(cur, psi0, 0.01, gs, oracle);
    series.points.push_back(std::move(p));
  };

  record(0, 0.0);
  for (int step = 1; step <= horizon; ++step) {
    if (evolution.kind == GrowthSpec::Kind::random_circuit) {
      // Draw a gate; skip the previous gate's inverse and no-ops on the
      // current state (diagonal gates on basis states, for instance).
      int chosen = -1;
      StateVector next = cur;
      for (int attempt = 0; attempt < 64; ++attempt) {
        int instr = static_cast<int>(rng.below(draw++, static_cast<std::uint64_t>(tab.size())));
        if (last_instr >= 0 && tab.inverse(last_instr) == instr) continue;
        Circuit one;
        one.ops.push_back(tab.app(instr));
        StateVector cand = apply_circuit(cur, one, gs);
        if (fidelity(cand, cur) >= 1.0 - 1e-9) continue;
        chosen = instr;
        next = std::move(cand);
        break;
      }
      if (chosen < 0) throw std::runtime_error("complexity_growth_probe: no usable random gate");
      applied.ops.push_back(tab.app(chosen));
      last_instr = chosen;
      cur = next;
      series.applied_prefix.push_back(applied);
    } else {
      cur = trotter_evolve(cur, evolution.hamiltonian, evolution.steps_per_sample);
    }
    if (step % stride == 0 || step == horizon) {
      double time = evolution.kind == GrowthSpec::Kind::random_circuit
                        ? static_cast<double>(step)
                        : step * evolution.steps_per_sample * evolution.hamiltonian.dt;
      record(step, time);
    }
  }

  int prev_lb = -1;
  for (std::size_t k = 0; k < series.points.size(); ++k) {
    int lb = series.points[k].complexity.certified_lower_bound();
    if (lb < prev_lb) series.lower_bound_violations.push_back(series.points[k].step);
    prev_lb = std::max(prev_lb, lb);
  }
  return series;
}

}  // namespace branchlab
