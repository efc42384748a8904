#include "branchlab/tm.hpp"

#include <algorithm>
#include <stdexcept>

#include "branchlab/parallel.hpp"

namespace branchlab {

BoundInterval interval_of(const ComplexityResult& r) {
  BoundInterval b;
  b.lower = r.certified_lower_bound();
  b.upper = r.gate_upper_bound();
  return b;
}

std::optional<int> TmPairReport::branchiness_lower() const {
  BoundInterval d = interval_of(c_d);
  BoundInterval i = interval_of(c_i);
  if (!d.upper) return std::nullopt;
  if (!c_i.exhaustive) return std::nullopt;  // heuristic C_I never certifies
  return i.lower - *d.upper;
}

std::optional<int> TmPairReport::branchiness_upper() const {
  BoundInterval d = interval_of(c_d);
  BoundInterval i = interval_of(c_i);
  if (!i.upper) return std::nullopt;
  if (!c_d.exhaustive) return std::nullopt;
  return *i.upper - d.lower;
}

ComplexityResult distinguishing_complexity(const StateVector& psi_i, const StateVector& psi_j,
                                           double epsilon, const GateSet& gs, const SearchOptions& opts) {
  ComplexityQuery q;
  q.predicate = Predicate::tm_distinguish(psi_i, psi_j, epsilon);
  q.options = opts;
  return query_complexity(q, gs);
}

ComplexityResult interference_complexity(const StateVector& psi_i, const StateVector& psi_j,
                                         double epsilon, const GateSet& gs, const SearchOptions& opts) {
  ComplexityQuery q;
  q.predicate = Predicate::tm_interfere(psi_i, psi_j, epsilon);
  q.options = opts;
  return query_complexity(q, gs);
}

TmReport evaluate_decomposition(const Decomposition& d, const TmOptions& opts, const GateSet& gs) {
  if (d.size() < 2) throw std::invalid_argument("evaluate_decomposition: needs >= 2 components");

  TmReport rep;
  rep.epsilon = opts.epsilon;
  rep.weights = d.weights();
  for (std::size_t i = 0; i < d.size(); ++i) rep.labels.push_back(d.label(i));

  std::vector<std::pair<int, int>> idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) idx.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  std::vector<StateVector> comps;
  comps.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) comps.push_back(d.normalized_component(i));

  rep.pairs.resize(idx.size());
  parallel_for_indexed(idx.size(), [&](std::size_t k) {
    auto [i, j] = idx[k];
    TmPairReport pr;
    pr.i = i;
    pr.j = j;
    pr.epsilon = opts.epsilon;
    pr.c_d = distinguishing_complexity(comps[static_cast<std::size_t>(i)], comps[static_cast<std::size_t>(j)],
                                       opts.epsilon, gs, opts.oracle);
    pr.c_i = interference_complexity(comps[static_cast<std::size_t>(i)], comps[static_cast<std::size_t>(j)],
                                     opts.epsilon, gs, opts.oracle);
    pr.pair_branchiness = pr.c_i.value - pr.c_d.value;
    rep.pairs[k] = std::move(pr);
  });

  rep.c_i_min = rep.pairs[0].c_i.value;
  rep.c_d_max = rep.pairs[0].c_d.value;
  for (const TmPairReport& pr : rep.pairs) {
    rep.c_i_min = std::min(rep.c_i_min, pr.c_i.value);
    rep.c_d_max = std::max(rep.c_d_max, pr.c_d.value);
  }
  rep.branchiness = rep.c_i_min - rep.c_d_max;

  // Certified aggregate: min over pairs of certified C_I lower bounds minus
  // max over pairs of witnessed C_D upper bounds; needs every pair certified.
  bool all_cert = true;
  int lo = 0;
  bool first = true;
  int d_up = 0;
  for (const TmPairReport& pr : rep.pairs) {
    auto du = interval_of(pr.c_d).upper;
    if (!du || !pr.c_i.exhaustive) {
      all_cert = false;
      break;
    }
    int il = interval_of(pr.c_i).lower;
    if (first) {
      lo = il;
      d_up = *du;
      first = false;
    } else {
      lo = std::min(lo, il);
      d_up = std::max(d_up, *du);
    }
  }
  if (all_cert) {
    rep.branchiness_lower = lo - d_up;
    rep.certified = true;
  }
  bool all_upper = true;
  int i_up = 0;
  int d_lo = 0;
  first = true;
  for (const TmPairReport& pr : rep.pairs) {
    auto iu = interval_of(pr.c_i).upper;
    if (!iu || !pr.c_d.exhaustive) {
      all_upper = false;
      break;
    }
    if (first) {
      i_up = *iu;
      d_lo = interval_of(pr.c_d).lower;
      first = false;
    } else {
      i_up = std::min(i_up, *iu);
      d_lo = std::max(d_lo, interval_of(pr.c_d).lower);
    }
  }
  if (all_upper) rep.branchiness_upper = i_up - d_lo;
  return rep;
}

std::vector<std::pair<std::string, std::vector<ProjectorSpec>>> CandidateFamily::generate(
    const LatticeSpec& lat) const {
  std::vector<std::pair<std::string, std::vector<ProjectorSpec>>> out;
  const int n = lat.n_sites;
  if (z_site && !pauli_eigensplit) {
    for (int q = 0; q < n; ++q) {
      out.emplace_back("z@" + std::to_string(q),
                       std::vector<ProjectorSpec>{ProjectorSpec::basis_assignment({q}, {0}),
                                                  ProjectorSpec::basis_assignment({q}, {1})});
    }
  }
  if (pauli_eigensplit) {
    const char axes[3] = {'Z', 'X', 'Y'};
    for (int q = 0; q < n; ++q) {
      for (char a : axes) {
        Observable p = Observable::pauli_single(n, q, a);
        out.emplace_back(std::string(1, a) + "@" + std::to_string(q),
                         std::vector<ProjectorSpec>{ProjectorSpec::pauli_eigenspace(p, +1),
                                                    ProjectorSpec::pauli_eigenspace(p, -1)});
      }
    }
    if (max_support >= 2) {
      for (int q = 0; q + 1 < n; ++q) {
        for (char a : axes) {
          for (char b : axes) {
            std::string s(static_cast<std::size_t>(n), 'I');
            s[static_cast<std::size_t>(q)] = a;
            s[static_cast<std::size_t>(q + 1)] = b;
            Observable p = Observable::pauli(s);
            out.emplace_back(std::string(1, a) + std::string(1, b) + "@" + std::to_string(q),
                             std::vector<ProjectorSpec>{ProjectorSpec::pauli_eigenspace(p, +1),
                                                        ProjectorSpec::pauli_eigenspace(p, -1)});
          }
        }
      }
    }
  }
  for (const auto& subset : computational_subsets) {
    if (subset.empty()) continue;
    std::vector<ProjectorSpec> projs;
    const int patterns = 1 << subset.size();
    for (int pat = 0; pat < patterns; ++pat) {
      std::vector<int> bits;
      for (std::size_t k = 0; k < subset.size(); ++k) bits.push_back((pat >> k) & 1);
      projs.push_back(ProjectorSpec::basis_assignment(subset, bits));
    }
    std::string name = "comp@{";
    for (std::size_t k = 0; k < subset.size(); ++k) {
      if (k) name += ",";
      name += std::to_string(subset[k]);
    }
    name += "}";
    out.emplace_back(std::move(name), std::move(projs));
  }
  for (const auto& u : user) out.push_back(u);
  return out;
}

TmSearchResult search_tm_split(const StateVector& psi, const TmOptions& opts, const CandidateFamily& family,
                               const GateSet& gs, int min_branchiness, int report_floor) {
  auto candidates = family.generate(psi.lattice());
  if (candidates.empty()) throw std::invalid_argument("search_tm_split: empty candidate family");

  TmSearchResult result;
  result.min_branchiness = min_branchiness;
  result.candidates.resize(candidates.size());

  std::vector<std::optional<Decomposition>> decomps(candidates.size());
  // Build decompositions serially (cheap), evaluate reports in parallel.
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    TmCandidateOutcome& out = result.candidates[k];
    out.name = candidates[k].first;
    try {
      Decomposition d = make_decomposition(psi, candidates[k].second);
      if (d.size() < 2) {
        out.error = "single component";
        continue;
      }
      out.valid = true;
      out.weights = d.weights();
      decomps[k] = std::move(d);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }
  parallel_for_indexed(candidates.size(), [&](std::size_t k) {
    if (!decomps[k]) return;
    result.candidates[k].report = evaluate_decomposition(*decomps[k], opts, gs);
  });

  // Dedup identical splits (same component rays), keeping the first.
  auto same_split = [](const Decomposition& a, const Decomposition& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      bool matched = false;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (same_ray(a.normalized_component(i), b.normalized_component(j), 1e-9)) {
          matched = true;
          break;
        }
      }
      if (!matched) return false;
    }
    return true;
  };

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!decomps[k] || !result.candidates[k].report) continue;
    const TmReport& rep = *result.candidates[k].report;
    if (!rep.branchiness_lower) continue;
    int cb = *rep.branchiness_lower;
    if (best) {
      const TmReport& brep = *result.candidates[*best].report;
      int bb = *brep.branchiness_lower;
      bool better = cb > bb ||
                    (cb == bb && decomps[k]->size() < decomps[*best]->size());
      if (same_split(*decomps[k], *decomps[*best]) || !better) continue;
    }
    best = k;
  }
  if (best) {
    const TmReport& rep = *result.candidates[*best].report;
    result.best = decomps[*best];
    result.best_report = rep;
    result.best_name = result.candidates[*best].name;
    result.found_good_split = rep.branchiness_lower && *rep.branchiness_lower >= min_branchiness;
  }
  (void)report_floor;  // candidates are all listed; callers filter when rendering
  return result;
}

}  // namespace branchlab
