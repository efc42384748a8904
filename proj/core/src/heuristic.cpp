#include "branchlab/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include <Eigen/Dense>

#include "branchlab/rng.hpp"

namespace branchlab {

namespace {

using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;

// Hermitian generator from 16 (or 4) real parameters, exponentiated to a unitary.
Mat4 block_unitary4(const double* p) {
  Mat4 h;
  h.setZero();
  int k = 0;
  for (int i = 0; i < 4; ++i) h(i, i) = cplx{p[k++], 0};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      cplx z{p[k], p[k + 1]};
      k += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat2 block_unitary2(const double* p) {
  Mat2 h;
  h(0, 0) = cplx{p[0], 0};
  h(1, 1) = cplx{p[1], 0};
  h(0, 1) = cplx{p[2], p[3]};
  h(1, 0) = std::conj(h(0, 1));
  Eigen::SelfAdjointEigenSolver<Mat2> es(h);
  Eigen::Vector2cd phases;
  for (int i = 0; i < 2; ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Brickwork layout: layer l (1-based) places blocks on pairs starting at
// (l-1) % 2. A 1-site lattice degenerates to one single-site block per layer.
std::vector<int> layer_sites(int n_sites, int layer) {
  std::vector<int> sites;
  if (n_sites == 1) {
    sites.push_back(0);
    return sites;
  }
  for (int p = (layer - 1) % 2; p + 1 < n_sites; p += 2) sites.push_back(p);
  return sites;
}

struct Ansatz {
  int n_sites = 1;
  std::vector<int> block_sites;  // site of each block, layer by layer
  int params_per_block = 16;

  int blocks() const { return static_cast<int>(block_sites.size()); }
  int n_params() const { return blocks() * params_per_block; }
};

Ansatz build_ansatz(int n_sites, int layers) {
  Ansatz a;
  a.n_sites = n_sites;
  a.params_per_block = n_sites == 1 ? 4 : 16;
  for (int l = 1; l <= layers; ++l) {
    for (int s : layer_sites(n_sites, l)) a.block_sites.push_back(s);
  }
  return a;
}

void apply_block(std::vector<cplx>& amps, int n_sites, int site, const Mat4& u) {
  Gate g;
  g.arity = 2;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) g.m[static_cast<std::size_t>(r * 4 + c)] = u(r, c);
  }
  apply_gate_inplace(amps, n_sites, g, site, site + 1);
}

void apply_block2(std::vector<cplx>& amps, int n_sites, int site, const Mat2& u) {
  Gate g;
  g.arity = 1;
  g.m[0] = u(0, 0);
  g.m[1] = u(0, 1);
  g.m[2] = u(1, 0);
  g.m[3] = u(1, 1);
  apply_gate_inplace(amps, n_sites, g, site, -1);
}

double ansatz_margin(const Ansatz& a, const std::vector<double>& params, const Predicate& pred) {
  std::vector<std::vector<cplx>> images;
  images.reserve(pred.probes.size());
  for (const StateVector& s : pred.probes) {
    std::vector<cplx> amps = s.amplitudes();
    for (int b = 0; b < a.blocks(); ++b) {
      const double* p = params.data() + static_cast<std::size_t>(b) * a.params_per_block;
      if (a.params_per_block == 4) {
        apply_block2(amps, a.n_sites, a.block_sites[static_cast<std::size_t>(b)], block_unitary2(p));
      } else {
        apply_block(amps, a.n_sites, a.block_sites[static_cast<std::size_t>(b)], block_unitary4(p));
      }
    }
    images.push_back(std::move(amps));
  }
  return pred.margin(images);
}

// Multi-start coordinate-free ascent with a numerical gradient and an
// adaptive step. Cheap and deterministic; quality only affects bound
// tightness, never soundness.
double optimize_ansatz(const Ansatz& a, const Predicate& pred, const SearchOptions& opts,
                       std::vector<double>& best_params) {
  const int np = a.n_params();
  double best = -1e300;
  for (int start = 0; start < std::max(1, opts.restarts); ++start) {
    CounterRng rng(opts.seed, 0x5eedULL * 131 + static_cast<std::uint64_t>(start));
    std::vector<double> p(static_cast<std::size_t>(np));
    const double scale = start == 0 ? 0.3 : 1.5;
    for (int i = 0; i < np; ++i) {
      p[static_cast<std::size_t>(i)] = scale * (2.0 * rng.uniform(static_cast<std::uint64_t>(i)) - 1.0);
    }
    double cur = ansatz_margin(a, p, pred);
    double step = 0.25;
    std::vector<double> grad(static_cast<std::size_t>(np));
    std::vector<double> trial(static_cast<std::size_t>(np));
    for (int iter = 0; iter < opts.opt_iterations; ++iter) {
      if (cur >= 1e-7) break;  // satisfied with slack
      const double h = 1e-4;
      double gnorm2 = 0;
      for (int i = 0; i < np; ++i) {
        double save = p[static_cast<std::size_t>(i)];
        p[static_cast<std::size_t>(i)] = save + h;
        double up = ansatz_margin(a, p, pred);
        p[static_cast<std::size_t>(i)] = save - h;
        double dn = ansatz_margin(a, p, pred);
        p[static_cast<std::size_t>(i)] = save;
        double g = (up - dn) / (2 * h);
        grad[static_cast<std::size_t>(i)] = g;
        gnorm2 += g * g;
      }
      if (gnorm2 < 1e-18) break;
      double gnorm = std::sqrt(gnorm2);
      bool improved = false;
      for (int tries = 0; tries < 12; ++tries) {
        for (int i = 0; i < np; ++i) {
          trial[static_cast<std::size_t>(i)] =
              p[static_cast<std::size_t>(i)] + step * grad[static_cast<std::size_t>(i)] / gnorm;
        }
        double val = ansatz_margin(a, trial, pred);
        if (val > cur + 1e-12) {
          p.swap(trial);
          cur = val;
          step = std::min(step * 1.6, 1.0);
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (cur > best) {
      best = cur;
      best_params = p;
      if (best >= 1e-7) break;
    }
  }
  return best;
}

}  // namespace

std::vector<cplx> apply_blocks(const std::vector<BrickBlock>& blocks, const StateVector& s) {
  std::vector<cplx> amps = s.amplitudes();
  const int n = s.lattice().n_sites;
  for (const BrickBlock& b : blocks) {
    Gate g;
    if (n == 1) {
      g.arity = 1;
      for (int k = 0; k < 4; ++k) g.m[static_cast<std::size_t>(k)] = b.unitary[static_cast<std::size_t>(k)];
      apply_gate_inplace(amps, n, g, b.site, -1);
    } else {
      g.arity = 2;
      g.m = b.unitary;
      apply_gate_inplace(amps, n, g, b.site, b.site + 1);
    }
  }
  return amps;
}

ComplexityResult heuristic_layer_complexity(const Predicate& pred, int max_layers,
                                            const SearchOptions& opts) {
  if (max_layers < 0) throw std::invalid_argument("heuristic_layer_complexity: max_layers < 0");
  const int n_sites = pred.lattice().n_sites;

  ComplexityResult res;
  res.unit = CostUnit::blocks;
  res.budget = max_layers;
  res.exhaustive = false;

  // L = 0: the empty circuit.
  {
    std::vector<std::vector<cplx>> images;
    for (const StateVector& s : pred.probes) images.push_back(s.amplitudes());
    if (pred.satisfied(images)) {
      res.value = 0;
      res.status = ComplexityStatus::upper_bound;
      res.block_bound = BlockUpperBound{0, 0, pred.margin(images), {}};
      return res;
    }
  }

  for (int layers = 1; layers <= max_layers; ++layers) {
    Ansatz a = build_ansatz(n_sites, layers);
    std::vector<double> params;
    double margin = optimize_ansatz(a, pred, opts, params);
    if (margin >= -1e-9) {
      BlockUpperBound bound;
      bound.blocks = a.blocks();
      bound.layers = layers;
      bound.margin = margin;
      for (int b = 0; b < a.blocks(); ++b) {
        BrickBlock blk;
        blk.site = a.block_sites[static_cast<std::size_t>(b)];
        const double* p = params.data() + static_cast<std::size_t>(b) * a.params_per_block;
        if (a.params_per_block == 4) {
          Mat2 u = block_unitary2(p);
          for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) blk.unitary[static_cast<std::size_t>(r * 2 + c)] = u(r, c);
          }
        } else {
          Mat4 u = block_unitary4(p);
          for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) blk.unitary[static_cast<std::size_t>(r * 4 + c)] = u(r, c);
          }
        }
        bound.witness.push_back(std::move(blk));
      }
      res.value = bound.blocks;
      res.status = ComplexityStatus::upper_bound;
      res.block_bound = std::move(bound);
      return res;
    }
  }

  // Not found: a heuristic miss, never a certificate.
  int blocks_tried = build_ansatz(n_sites, max_layers).blocks();
  res.value = blocks_tried + 1;
  res.status = ComplexityStatus::lower_bound_cutoff;
  return res;
}

std::optional<std::pair<Circuit, int>> discrete_witness_search(const Predicate& pred, const GateSet& gs,
                                                               const SearchOptions& opts) {
  const LatticeSpec lat = pred.lattice();
  const std::size_t dim = lat.dim();
  const std::size_t n_probes = pred.probes.size();
  InstructionTable tab(gs, lat);

  struct BeamNode {
    std::vector<cplx> joint;
    std::vector<std::uint16_t> enc;
    double margin = 0;
    int cost = 0;
  };

  std::vector<cplx> joint0;
  for (const StateVector& s : pred.probes) {
    joint0.insert(joint0.end(), s.amplitudes().begin(), s.amplitudes().end());
  }
  auto margin_of = [&](const std::vector<cplx>& joint) {
    std::vector<std::vector<cplx>> images(n_probes);
    for (std::size_t p = 0; p < n_probes; ++p) {
      images[p].assign(joint.begin() + static_cast<std::ptrdiff_t>(p * dim),
                       joint.begin() + static_cast<std::ptrdiff_t>((p + 1) * dim));
    }
    return pred.margin(images);
  };

  BeamNode root{joint0, {}, margin_of(joint0), 0};
  if (root.margin >= -1e-9) return std::make_pair(Circuit{}, 0);

  std::vector<BeamNode> beam{std::move(root)};
  std::vector<cplx> scratch(dim);
  for (int depth = 1; depth <= opts.beam_depth; ++depth) {
    std::vector<BeamNode> children;
    children.reserve(beam.size() * static_cast<std::size_t>(tab.size()));
    std::optional<BeamNode> found;
    for (const BeamNode& node : beam) {
      for (int instr = 0; instr < tab.size(); ++instr) {
        int cost = node.cost + tab.cost(instr);
        if (cost > opts.budget) continue;
        BeamNode child;
        child.joint = node.joint;
        const GateApp& op = tab.app(instr);
        for (std::size_t p = 0; p < n_probes; ++p) {
          std::memcpy(scratch.data(), child.joint.data() + p * dim, dim * sizeof(cplx));
          apply_gate_inplace(scratch, lat.n_sites, gs.gate(op.gate), op.a, op.b);
          std::memcpy(child.joint.data() + p * dim, scratch.data(), dim * sizeof(cplx));
        }
        child.enc = node.enc;
        child.enc.push_back(static_cast<std::uint16_t>(instr));
        child.cost = cost;
        child.margin = margin_of(child.joint);
        if (child.margin >= -1e-9) {
          if (!found || child.cost < found->cost || (child.cost == found->cost && child.enc < found->enc)) {
            found = child;
          }
        }
        children.push_back(std::move(child));
      }
    }
    if (found) {
      Circuit c;
      for (std::uint16_t i : found->enc) c.ops.push_back(tab.app(i));
      return std::make_pair(std::move(c), found->cost);
    }
    if (children.empty()) break;
    std::stable_sort(children.begin(), children.end(), [](const BeamNode& x, const BeamNode& y) {
      if (x.margin != y.margin) return x.margin > y.margin;
      if (x.cost != y.cost) return x.cost < y.cost;
      return x.enc < y.enc;
    });
    if (static_cast<int>(children.size()) > opts.beam_width) {
      children.resize(static_cast<std::size_t>(opts.beam_width));
    }
    beam = std::move(children);
  }
  return std::nullopt;
}

}  // namespace branchlab
