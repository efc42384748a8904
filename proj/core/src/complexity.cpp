#include "branchlab/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>

#include "branchlab/cache.hpp"
#include "branchlab/heuristic.hpp"
#include "branchlab/json_io.hpp"
#include "branchlab/rng.hpp"

namespace branchlab {

const char* to_string(ComplexityStatus s) {
  switch (s) {
    case ComplexityStatus::exact:
      return "exact";
    case ComplexityStatus::upper_bound:
      return "upper_bound";
    case ComplexityStatus::lower_bound_cutoff:
      return "lower_bound_cutoff";
  }
  return "?";
}

const char* to_string(SearchMode m) { return m == SearchMode::exact_bfs ? "exact" : "heuristic"; }
const char* to_string(CostUnit u) { return u == CostUnit::gates ? "gates" : "blocks"; }

// ---------------------------------------------------------------------------
// Predicate

Predicate Predicate::state_map(StateVector source, StateVector target, double delta) {
  if (delta <= 0 || delta >= 1) throw std::invalid_argument("state_map: delta outside (0,1)");
  if (!source.is_normalized(1e-10) || !target.is_normalized(1e-10)) {
    throw std::invalid_argument("state_map: states must be normalized");
  }
  if (source.dim() != target.dim()) throw std::invalid_argument("state_map: dimension mismatch");
  Predicate p;
  p.kind = Kind::state_map;
  p.probes = {std::move(source)};
  p.target = std::move(target);
  p.threshold = delta;
  p.label = "state_map";
  return p;
}

namespace {
void check_tm_inputs(const StateVector& a, const StateVector& b, double epsilon) {
  if (epsilon <= 0 || epsilon >= 0.5) throw std::invalid_argument("tm predicate: epsilon outside (0, 1/2)");
  if (!a.is_normalized(1e-10) || !b.is_normalized(1e-10)) {
    throw std::invalid_argument("tm predicate: states must be normalized");
  }
  if (std::abs(inner_product(a, b)) > 1e-8) {
    throw std::invalid_argument("tm predicate: states must be orthogonal to 1e-8");
  }
}
}  // namespace

Predicate Predicate::tm_distinguish(StateVector psi_i, StateVector psi_j, double epsilon) {
  check_tm_inputs(psi_i, psi_j, epsilon);
  Predicate p;
  p.kind = Kind::tm_distinguish;
  p.probes = {std::move(psi_i), std::move(psi_j)};
  p.threshold = epsilon;
  p.label = "tm_distinguish";
  return p;
}

Predicate Predicate::tm_interfere(StateVector psi_i, StateVector psi_j, double epsilon) {
  check_tm_inputs(psi_i, psi_j, epsilon);
  Predicate p;
  p.kind = Kind::tm_interfere;
  p.probes = {std::move(psi_i), std::move(psi_j)};
  p.threshold = epsilon;
  p.label = "tm_interfere";
  return p;
}

Predicate Predicate::custom(std::vector<StateVector> probes,
                            std::function<double(const std::vector<std::vector<cplx>>&)> margin,
                            std::string label) {
  if (probes.empty()) throw std::invalid_argument("custom predicate: needs at least one probe state");
  Predicate p;
  p.kind = Kind::custom;
  p.probes = std::move(probes);
  p.custom_margin = std::move(margin);
  p.label = std::move(label);
  return p;
}

const LatticeSpec& Predicate::lattice() const { return probes.front().lattice(); }

namespace {
cplx raw_inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}
}  // namespace

double Predicate::margin(const std::vector<std::vector<cplx>>& images) const {
  switch (kind) {
    case Kind::state_map:
      return std::abs(raw_inner(target.amplitudes(), images[0])) - (1.0 - threshold);
    case Kind::tm_distinguish: {
      cplx di = raw_inner(probes[0].amplitudes(), images[0]);
      cplx dj = raw_inner(probes[1].amplitudes(), images[1]);
      return 0.5 * std::abs(di - dj) - (1.0 - threshold);
    }
    case Kind::tm_interfere: {
      double xij = std::abs(raw_inner(probes[0].amplitudes(), images[1]));
      double xji = std::abs(raw_inner(probes[1].amplitudes(), images[0]));
      return 0.5 * (xij + xji) - threshold;
    }
    case Kind::custom:
      return custom_margin(images);
  }
  throw std::logic_error("Predicate::margin: unreachable");
}

double Predicate::evaluate_circuit_margin(const Circuit& c, const GateSet& gs) const {
  std::vector<std::vector<cplx>> images;
  images.reserve(probes.size());
  for (const StateVector& s : probes) images.push_back(apply_circuit(s, c, gs).amplitudes());
  return margin(images);
}

// ---------------------------------------------------------------------------
// Canonical grid hashing

namespace {

struct Key128 {
  std::uint64_t a = 0, b = 0;
  friend bool operator==(const Key128& x, const Key128& y) = default;
};

struct Key128Hash {
  std::size_t operator()(const Key128& k) const { return k.a ^ (k.b * 0x9e3779b97f4a7c15ULL); }
};

// Canonicalize a common global phase across the concatenated images, round
// to the dedup grid, hash with two independent FNV streams.
Key128 canonical_key(const std::vector<cplx>& joint, double grid) {
  cplx phase{1, 0};
  for (const cplx& z : joint) {
    double m = std::abs(z);
    if (m > 1e-7) {
      phase = std::conj(z) / m;
      break;
    }
  }
  std::uint64_t h1 = 0xcbf29ce484222325ULL;
  std::uint64_t h2 = 0x9ae16a3b2f90404fULL;
  const double inv = 1.0 / grid;
  for (const cplx& z : joint) {
    cplx w = z * phase;
    auto re = static_cast<std::int64_t>(std::llround(w.real() * inv));
    auto im = static_cast<std::int64_t>(std::llround(w.imag() * inv));
    h1 = (h1 ^ static_cast<std::uint64_t>(re)) * 0x100000001b3ULL;
    h1 = (h1 ^ static_cast<std::uint64_t>(im)) * 0x100000001b3ULL;
    h2 = splitmix64(h2 ^ static_cast<std::uint64_t>(re));
    h2 = splitmix64(h2 ^ static_cast<std::uint64_t>(im));
  }
  return Key128{h1, h2};
}

using Encoding = std::vector<std::uint16_t>;

Circuit decode(const Encoding& enc, const InstructionTable& tab) {
  Circuit c;
  c.ops.reserve(enc.size());
  for (std::uint16_t i : enc) c.ops.push_back(tab.app(i));
  return c;
}

struct Node {
  std::vector<cplx> joint;  // concatenated probe images
  Encoding enc;
};

void apply_instruction(std::vector<cplx>& joint, std::size_t dim, std::size_t n_probes,
                       const InstructionTable& tab, int instr, int n_sites) {
  const GateApp& op = tab.app(instr);
  const Gate& g = tab.gate_set().gate(op.gate);
  std::vector<cplx> scratch(dim);
  for (std::size_t p = 0; p < n_probes; ++p) {
    std::memcpy(scratch.data(), joint.data() + p * dim, dim * sizeof(cplx));
    apply_gate_inplace(scratch, n_sites, g, op.a, op.b);
    std::memcpy(joint.data() + p * dim, scratch.data(), dim * sizeof(cplx));
  }
}

std::vector<std::vector<cplx>> split_joint(const std::vector<cplx>& joint, std::size_t dim, std::size_t n) {
  std::vector<std::vector<cplx>> images(n);
  for (std::size_t p = 0; p < n; ++p) {
    images[p].assign(joint.begin() + static_cast<std::ptrdiff_t>(p * dim),
                     joint.begin() + static_cast<std::ptrdiff_t>((p + 1) * dim));
  }
  return images;
}

// ---------------------------------------------------------------------------
// Forward BFS over probe images

ComplexityResult forward_bfs(const Predicate& pred, const GateSet& gs, int budget,
                             const SearchOptions& opts) {
  if (budget < 0) throw std::invalid_argument("bfs_synthesize: budget < 0");
  const LatticeSpec lat = pred.lattice();
  const std::size_t dim = lat.dim();
  const std::size_t n_probes = pred.probes.size();
  InstructionTable tab(gs, lat);

  std::vector<cplx> joint0;
  joint0.reserve(dim * n_probes);
  for (const StateVector& s : pred.probes) {
    joint0.insert(joint0.end(), s.amplitudes().begin(), s.amplitudes().end());
  }

  ComplexityResult res;
  res.budget = budget;
  if (pred.satisfied(split_joint(joint0, dim, n_probes))) {
    res.value = 0;
    res.status = ComplexityStatus::exact;
    res.exhaustive = true;
    res.witness = Circuit{};
    return res;
  }

  std::unordered_set<Key128, Key128Hash> visited;
  visited.insert(canonical_key(joint0, opts.dedup_grid));

  // Buckets by exact cost. With unit costs bucket c is generated in
  // lexicographic order; with mixed costs each bucket is sorted before use.
  std::vector<std::vector<Node>> buckets(static_cast<std::size_t>(budget) + 1);
  buckets[0].push_back(Node{std::move(joint0), {}});
  bool truncated = false;
  std::size_t nodes = 1;
  int exhausted = 0;

  for (int c = 0; c <= budget; ++c) {
    auto& bucket = buckets[static_cast<std::size_t>(c)];
    if (!gs.unit_costs()) {
      std::stable_sort(bucket.begin(), bucket.end(),
                       [](const Node& x, const Node& y) { return x.enc < y.enc; });
    }
    if (c > 0) {
      for (const Node& node : bucket) {
        if (pred.satisfied(split_joint(node.joint, dim, n_probes))) {
          res.value = c;
          res.status = ComplexityStatus::exact;
          res.exhaustive = true;
          res.witness = decode(node.enc, tab);
          return res;
        }
      }
    }
    if (truncated) break;
    exhausted = c;
    if (c == budget) break;
    for (const Node& node : bucket) {
      for (int instr = 0; instr < tab.size(); ++instr) {
        int child_cost = c + tab.cost(instr);
        if (child_cost > budget) continue;
        std::vector<cplx> joint = node.joint;
        apply_instruction(joint, dim, n_probes, tab, instr, lat.n_sites);
        Key128 key = canonical_key(joint, opts.dedup_grid);
        if (!visited.insert(key).second) continue;
        if (nodes >= opts.node_limit) {
          truncated = true;
          break;
        }
        ++nodes;
        Encoding enc = node.enc;
        enc.push_back(static_cast<std::uint16_t>(instr));
        buckets[static_cast<std::size_t>(child_cost)].push_back(Node{std::move(joint), std::move(enc)});
      }
      if (truncated) break;
    }
    if (truncated) {
      // Children of level c are incomplete, so only levels <= c are certified.
      for (int cc = c + 1; cc <= budget; ++cc) {
        for (const Node& node : buckets[static_cast<std::size_t>(cc)]) {
          if (pred.satisfied(split_joint(node.joint, dim, n_probes))) {
            res.value = cc;
            res.status = ComplexityStatus::upper_bound;
            res.witness = decode(node.enc, tab);
            res.memory_limited = true;
            return res;
          }
        }
      }
    }
  }

  res.value = exhausted + 1;
  res.status = ComplexityStatus::lower_bound_cutoff;
  res.exhaustive = true;
  res.memory_limited = truncated;
  res.budget = truncated ? exhausted : budget;
  return res;
}

// ---------------------------------------------------------------------------
// Meet-in-the-middle for state_map over inverse-closed unit-cost sets

struct HalfLevel {
  // Row-major (count x dim) images, plus encodings in matching order.
  std::vector<cplx> states;
  std::vector<Encoding> encs;
  std::size_t count = 0;
};

// Enumerate dedup'd circuit images level by level from `root`.
// complete_depth reports the deepest fully expanded level.
std::vector<HalfLevel> grow_half(const StateVector& root, const InstructionTable& tab, int depth,
                                 const SearchOptions& opts, int& complete_depth) {
  const std::size_t dim = root.dim();
  std::vector<HalfLevel> levels(static_cast<std::size_t>(depth) + 1);
  std::unordered_set<Key128, Key128Hash> visited;
  visited.insert(canonical_key(root.amplitudes(), opts.dedup_grid));
  levels[0].states = root.amplitudes();
  levels[0].encs = {Encoding{}};
  levels[0].count = 1;
  std::size_t nodes = 1;
  bool truncated = false;
  complete_depth = depth;

  std::vector<cplx> scratch(dim);
  for (int c = 0; c < depth && !truncated; ++c) {
    const HalfLevel& cur = levels[static_cast<std::size_t>(c)];
    HalfLevel& next = levels[static_cast<std::size_t>(c) + 1];
    for (std::size_t idx = 0; idx < cur.count && !truncated; ++idx) {
      const cplx* base = cur.states.data() + idx * dim;
      for (int instr = 0; instr < tab.size(); ++instr) {
        std::memcpy(scratch.data(), base, dim * sizeof(cplx));
        const GateApp& op = tab.app(instr);
        apply_gate_inplace(scratch, tab.lattice().n_sites, tab.gate_set().gate(op.gate), op.a, op.b);
        Key128 key = canonical_key(scratch, opts.dedup_grid);
        if (!visited.insert(key).second) continue;
        if (nodes >= opts.node_limit) {
          truncated = true;
          complete_depth = c;  // level c+1 is partial
          break;
        }
        ++nodes;
        next.states.insert(next.states.end(), scratch.begin(), scratch.end());
        Encoding enc = cur.encs[idx];
        enc.push_back(static_cast<std::uint16_t>(instr));
        next.encs.push_back(std::move(enc));
        ++next.count;
      }
    }
  }
  return levels;
}

// All (i, j) with |<B_j|F_i>| >= 1 - delta, via blocked GEMM.
std::vector<std::pair<std::size_t, std::size_t>> join_levels(const HalfLevel& fwd, const HalfLevel& bwd,
                                                             std::size_t dim, double delta) {
  std::vector<std::pair<std::size_t, std::size_t>> hits;
  if (fwd.count == 0 || bwd.count == 0) return hits;
  using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> F(fwd.states.data(), static_cast<Eigen::Index>(fwd.count),
                          static_cast<Eigen::Index>(dim));
  const double want = 1.0 - delta - 1e-9;
  const std::size_t chunk = 2048;
  for (std::size_t j0 = 0; j0 < bwd.count; j0 += chunk) {
    std::size_t j1 = std::min(bwd.count, j0 + chunk);
    Eigen::Map<const Mat> B(bwd.states.data() + j0 * dim, static_cast<Eigen::Index>(j1 - j0),
                            static_cast<Eigen::Index>(dim));
    Mat G = B.conjugate() * F.transpose();  // G(j, i) = <B_j|F_i>
    for (Eigen::Index j = 0; j < G.rows(); ++j) {
      for (Eigen::Index i = 0; i < G.cols(); ++i) {
        if (std::abs(G(j, i)) >= want) {
          hits.emplace_back(static_cast<std::size_t>(i), j0 + static_cast<std::size_t>(j));
        }
      }
    }
  }
  return hits;
}

ComplexityResult mitm_state_map(const Predicate& pred, const GateSet& gs, int budget,
                                const SearchOptions& opts) {
  const LatticeSpec lat = pred.lattice();
  const std::size_t dim = lat.dim();
  InstructionTable tab(gs, lat);

  ComplexityResult res;
  res.budget = budget;
  if (std::abs(raw_inner(pred.target.amplitudes(), pred.probes[0].amplitudes())) >= 1.0 - pred.threshold - 1e-9) {
    res.value = 0;
    res.status = ComplexityStatus::exact;
    res.exhaustive = true;
    res.witness = Circuit{};
    return res;
  }

  const int f_max = (budget + 1) / 2;
  const int b_max = budget - f_max;
  int f_ok = f_max, b_ok = b_max;
  std::vector<HalfLevel> fwd = grow_half(pred.probes[0], tab, f_max, opts, f_ok);
  std::vector<HalfLevel> bwd = grow_half(pred.target, tab, b_max, opts, b_ok);
  const bool truncated = f_ok < f_max || b_ok < b_max;
  const int certified_budget = f_ok + b_ok;

  for (int total = 1; total <= certified_budget; ++total) {
    // Collect every split's hits at this total, then take the lex-least.
    std::optional<Encoding> best;
    for (int a = std::max(0, total - b_ok); a <= std::min(total, f_ok); ++a) {
      int b = total - a;
      auto hits = join_levels(fwd[static_cast<std::size_t>(a)], bwd[static_cast<std::size_t>(b)], dim,
                              pred.threshold);
      for (auto [i, j] : hits) {
        Encoding enc = fwd[static_cast<std::size_t>(a)].encs[i];
        const Encoding& back = bwd[static_cast<std::size_t>(b)].encs[j];
        for (auto it = back.rbegin(); it != back.rend(); ++it) {
          int inv = tab.inverse(*it);
          enc.push_back(static_cast<std::uint16_t>(inv));
        }
        if (!best || enc < *best) best = std::move(enc);
      }
    }
    if (best) {
      res.value = total;
      res.status = ComplexityStatus::exact;
      res.exhaustive = true;
      res.witness = decode(*best, tab);
      return res;
    }
  }

  res.value = certified_budget + 1;
  res.status = ComplexityStatus::lower_bound_cutoff;
  res.exhaustive = true;
  res.memory_limited = truncated;
  res.budget = certified_budget;
  return res;
}

ComplexityResult exact_complexity(const Predicate& pred, const GateSet& gs, const SearchOptions& opts) {
  bool mitm_ok = pred.kind == Predicate::Kind::state_map && gs.inverse_closed() && gs.unit_costs();
  return mitm_ok ? mitm_state_map(pred, gs, opts.budget, opts) : forward_bfs(pred, gs, opts.budget, opts);
}

}  // namespace

// ---------------------------------------------------------------------------

ComplexityResult bfs_synthesize(const Predicate& pred, const GateSet& gs, int budget,
                                const SearchOptions& opts) {
  SearchOptions o = opts;
  o.budget = budget;
  return forward_bfs(pred, gs, budget, o);
}

ComplexityResult state_complexity(const StateVector& source, const StateVector& target, double delta,
                                  const GateSet& gs, const SearchOptions& opts) {
  ComplexityQuery q;
  q.predicate = Predicate::state_map(source, target, delta);
  q.options = opts;
  return query_complexity(q, gs);
}

ComplexityResult query_complexity(const ComplexityQuery& q, const GateSet& gs) {
  const Predicate& pred = q.predicate;
  if (pred.kind == Predicate::Kind::custom) {
    // Custom predicates are not cacheable or relaxable; search directly.
    return forward_bfs(pred, gs, q.options.budget, q.options);
  }
  if (q.options.budget < 0) throw std::invalid_argument("query_complexity: budget < 0");

  std::string fingerprint;
  std::string key;
  if (q.options.cache) {
    key = cache_key_for_query(pred, gs, q.options, &fingerprint);
    if (auto hit = q.options.cache->get(key, fingerprint)) {
      if (auto res = complexity_result_from_json_string(*hit, gs)) return *res;
    }
  }

  ComplexityResult res;
  if (q.options.mode == SearchMode::exact_bfs) {
    res = exact_complexity(pred, gs, q.options);
  } else {
    // Brickwork relaxation plus a discrete witnessed bound.
    ComplexityResult blocks = heuristic_layer_complexity(pred, q.options.max_layers, q.options);
    auto discrete = discrete_witness_search(pred, gs, q.options);
    if (pred.kind == Predicate::Kind::state_map) {
      // Gate-unit headline; block bound attached.
      if (discrete) {
        res.value = discrete->second;
        res.status = ComplexityStatus::upper_bound;
        res.unit = CostUnit::gates;
        res.witness = discrete->first;
      } else {
        res.value = q.options.budget + 1;
        res.status = ComplexityStatus::lower_bound_cutoff;
        res.unit = CostUnit::gates;
      }
      res.block_bound = blocks.block_bound;
    } else {
      // tm predicates: the relaxation is the headline, in block units.
      res = blocks;
    }
    if (discrete) {
      res.discrete_upper_bound = discrete->second;
      res.discrete_witness = discrete->first;
    }
    res.exhaustive = false;
    res.budget = q.options.budget;
  }

  if (q.options.cache) {
    q.options.cache->put(key, fingerprint, complexity_result_to_json_string(res, gs));
  }
  return res;
}

}  // namespace branchlab
