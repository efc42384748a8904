#include "branchlab/weingarten.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "branchlab/parallel.hpp"

namespace branchlab {

QConfig QConfig::defaults(const LatticeSpec& lat) {
  QConfig cfg;
  cfg.vacuum = StateVector::basis_state(lat, 0);
  return cfg;
}

QReport q_functional(const Decomposition& d, const QConfig& cfg, const GateSet& gs) {
  if (cfg.b < 0) throw std::invalid_argument("q_functional: b must be >= 0");
  if (!d.parent().is_normalized(1e-10)) throw std::invalid_argument("q_functional: parent not normalized");
  if (!cfg.vacuum.is_normalized(1e-10)) throw std::invalid_argument("q_functional: vacuum not normalized");

  QReport rep;
  rep.b = cfg.b;
  rep.branches.resize(d.size());
  parallel_for_indexed(d.size(), [&](std::size_t i) {
    QBranchEntry e;
    e.weight = d.weight(i);
    e.label = d.label(i);
    e.complexity = state_complexity(d.normalized_component(i), cfg.vacuum, cfg.delta, gs, cfg.oracle);
    rep.branches[i] = std::move(e);
  });

  rep.exact = true;
  for (const QBranchEntry& e : rep.branches) {
    double c = e.complexity.value;
    rep.complexity_term += e.weight * c * c;
    rep.entropy_term -= e.weight * std::log(e.weight);
    if (e.complexity.status != ComplexityStatus::exact) rep.exact = false;
  }
  // Weights within the floor keep w ln w finite; clamp the tiny negative
  // round-off that shows up when a weight is within 1e-16 of 1.
  if (rep.entropy_term < 0 && rep.entropy_term > -1e-12) rep.entropy_term = 0;
  rep.q_value = rep.complexity_term + cfg.b * rep.entropy_term;
  return rep;
}

namespace {

// Composes a refinement: replace component `slot` of `base` by the pieces of
// `fine` (a decomposition of that normalized component, scaled back).
std::optional<Decomposition> refine_component(const Decomposition& base, std::size_t slot,
                                              const std::vector<ProjectorSpec>& projs) {
  std::vector<std::vector<cplx>> comps;
  std::vector<std::string> labels;
  StateVector piece(base.parent().lattice(), base.component(slot));
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i == slot) continue;
    comps.push_back(base.component(i));
    labels.push_back(base.label(i));
  }
  try {
    Decomposition fine = make_decomposition(piece.normalized(), projs);
    if (fine.size() < 2) return std::nullopt;
    double scale = std::sqrt(base.weight(slot));
    for (std::size_t i = 0; i < fine.size(); ++i) {
      std::vector<cplx> c = fine.component(i);
      for (cplx& z : c) z *= scale;
      comps.push_back(std::move(c));
      labels.push_back(base.label(slot) + "/" + fine.label(i));
    }
    return Decomposition(base.parent(), std::move(comps), std::move(labels));
  } catch (const std::exception&) {
    // Orthogonality against the untouched components can fail for
    // non-commuting projectors; such refinements are simply not candidates.
    return std::nullopt;
  }
}

}  // namespace

QMinimizeResult minimize_q(const StateVector& psi, const QConfig& cfg, const CandidateFamily& family,
                           const GateSet& gs, double tie_tol) {
  auto fam = family.generate(psi.lattice());
  if (fam.empty()) throw std::invalid_argument("minimize_q: empty candidate family");

  struct Entry {
    Decomposition d;
    QReport rep;
    std::string name;
  };
  std::vector<Entry> entries;
  entries.push_back(Entry{Decomposition::trivial(psi), {}, "trivial"});

  std::vector<QCandidateOutcome> outcomes(fam.size() + 1);
  outcomes[0].name = "trivial";
  outcomes[0].valid = true;

  for (std::size_t k = 0; k < fam.size(); ++k) {
    QCandidateOutcome& out = outcomes[k + 1];
    out.name = fam[k].first;
    try {
      Decomposition d = make_decomposition(psi, fam[k].second);
      if (d.size() < 2) {
        out.error = "single component";
        continue;
      }
      out.valid = true;
      entries.push_back(Entry{std::move(d), {}, fam[k].first});
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }

  // Greedy recursive refinement of each non-trivial candidate.
  std::size_t base_count = entries.size();
  for (std::size_t k = 1; k < base_count; ++k) {
    Decomposition cur = entries[k].d;
    QReport cur_rep = q_functional(cur, cfg, gs);
    bool improved = true;
    int guard = 0;
    while (improved && ++guard <= 8) {
      improved = false;
      for (std::size_t slot = 0; slot < cur.size() && !improved; ++slot) {
        for (const auto& cand : fam) {
          auto refined = refine_component(cur, slot, cand.second);
          if (!refined) continue;
          QReport rep = q_functional(*refined, cfg, gs);
          if (rep.q_value < cur_rep.q_value - 1e-12) {
            cur = std::move(*refined);
            cur_rep = rep;
            improved = true;
            break;
          }
        }
      }
    }
    if (cur.size() != entries[k].d.size()) {
      entries.push_back(Entry{std::move(cur), cur_rep, entries[k].name + "+refined"});
    }
  }

  parallel_for_indexed(entries.size(), [&](std::size_t k) {
    if (entries[k].rep.branches.empty()) entries[k].rep = q_functional(entries[k].d, cfg, gs);
  });

  // Minimal q; ties toward fewer branches, then insertion order.
  std::size_t best = 0;
  for (std::size_t k = 1; k < entries.size(); ++k) {
    const QReport& a = entries[k].rep;
    const QReport& b = entries[best].rep;
    if (a.q_value < b.q_value - tie_tol ||
        (std::abs(a.q_value - b.q_value) <= tie_tol && entries[k].d.size() < entries[best].d.size())) {
      best = k;
    }
  }
  double second = 0;
  bool has_second = false;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k == best) continue;
    if (!has_second || entries[k].rep.q_value < second) {
      second = entries[k].rep.q_value;
      has_second = true;
    }
  }

  QMinimizeResult res;
  res.best = entries[best].d;
  res.report = entries[best].rep;
  res.name = entries[best].name;
  res.tie_tol = tie_tol;
  res.q_gap_to_second = has_second ? second - entries[best].rep.q_value : 0;
  res.near_tie = has_second && std::abs(res.q_gap_to_second) <= tie_tol;

  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    for (const Entry& e : entries) {
      if (e.name == outcomes[k].name) {
        outcomes[k].report = e.rep;
        outcomes[k].branch_count = e.d.size();
        break;
      }
    }
  }
  res.candidates = std::move(outcomes);
  return res;
}

namespace {

// True when every component of `coarse` is (numerically) a sum of components
// of `fine`. Both decompose the same parent into orthogonal pieces, so that
// holds exactly when each fine component overlaps exactly one coarse one.
bool refines(const Decomposition& fine, const Decomposition& coarse) {
  if (fine.size() < coarse.size()) return false;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    StateVector f = fine.normalized_component(i);
    int overlapping = 0;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      if (std::abs(inner_product(coarse.normalized_component(j), f)) > 1e-6) ++overlapping;
    }
    if (overlapping != 1) return false;
  }
  return true;
}

}  // namespace

std::vector<BSweepRow> b_sweep(const StateVector& psi, const QConfig& base, std::vector<double> b_values,
                               const CandidateFamily& family, const GateSet& gs, double sweep_tie_tol) {
  if (b_values.empty()) throw std::invalid_argument("b_sweep: empty b grid");
  if (!std::is_sorted(b_values.begin(), b_values.end())) {
    throw std::invalid_argument("b_sweep: b values must be sorted ascending");
  }
  std::vector<BSweepRow> rows;
  std::optional<Decomposition> prev;
  for (double b : b_values) {
    QConfig cfg = base;
    cfg.b = b;
    QMinimizeResult m = minimize_q(psi, cfg, family, gs);
    BSweepRow row;
    row.b = b;
    row.branch_count = m.best.size();
    row.q_value = m.report.q_value;
    row.q_gap = m.q_gap_to_second;
    row.near_tie = std::abs(m.q_gap_to_second) <= sweep_tie_tol;
    row.chosen = m.name;
    if (prev) row.nests_in_previous = refines(*prev, m.best);
    rows.push_back(row);
    prev = m.best;
  }
  return rows;
}

}  // namespace branchlab
