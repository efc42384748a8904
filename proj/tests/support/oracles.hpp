#pragma once

// Test-only oracles, intentionally independent of the search machinery under
// test: raw nested-loop circuit enumeration (no dedup, no hashing) and dense
// matrix construction for gates, circuits, and Hamiltonians.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "branchlab/complexity.hpp"
#include "branchlab/gates.hpp"
#include "branchlab/lattice.hpp"

namespace branchlab::testing {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Vec to_eigen(const std::vector<cplx>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline std::vector<cplx> from_eigen(const Vec& v) {
  std::vector<cplx> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

// Dense matrix of one placed gate, built by explicit index bookkeeping.
inline Mat dense_gate(const Gate& g, int a, int b, int n_sites) {
  const std::size_t dim = std::size_t{1} << n_sites;
  Mat m = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    if (g.arity == 1) {
      int va = bit_of(col, a);
      for (int va2 = 0; va2 < 2; ++va2) {
        std::size_t row = (col & ~(std::size_t{1} << a)) | (static_cast<std::size_t>(va2) << a);
        m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
            g.m[static_cast<std::size_t>(va2 * 2 + va)];
      }
    } else {
      int va = bit_of(col, a);
      int vb = bit_of(col, b);
      int l = va * 2 + vb;
      for (int l2 = 0; l2 < 4; ++l2) {
        int va2 = l2 / 2, vb2 = l2 % 2;
        std::size_t row = col;
        row = (row & ~(std::size_t{1} << a)) | (static_cast<std::size_t>(va2) << a);
        row = (row & ~(std::size_t{1} << b)) | (static_cast<std::size_t>(vb2) << b);
        m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) +=
            g.m[static_cast<std::size_t>(l2 * 4 + l)];
      }
    }
  }
  return m;
}

inline Mat dense_circuit(const Circuit& c, const GateSet& gs, int n_sites) {
  const std::size_t dim = std::size_t{1} << n_sites;
  Mat u = Mat::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const GateApp& op : c.ops) {
    u = dense_gate(gs.gate(op.gate), op.a, op.b, n_sites) * u;
  }
  return u;
}

// Minimal circuit cost satisfying `ok`, by raw enumeration of every
// instruction sequence of cost 0, 1, ..., budget (unit costs assumed).
// Returns nullopt when nothing within budget satisfies.
inline std::optional<int> brute_force_min_cost(
    const std::vector<StateVector>& probes,
    const std::function<bool(const std::vector<std::vector<cplx>>&)>& ok, const GateSet& gs,
    const LatticeSpec& lat, int budget) {
  InstructionTable tab(gs, lat);
  const int m = tab.size();

  std::vector<std::vector<cplx>> images;
  for (const StateVector& p : probes) images.push_back(p.amplitudes());
  if (ok(images)) return 0;

  for (int len = 1; len <= budget; ++len) {
    std::vector<int> odo(static_cast<std::size_t>(len), 0);
    for (;;) {
      images.clear();
      for (const StateVector& p : probes) {
        std::vector<cplx> amps = p.amplitudes();
        for (int k = 0; k < len; ++k) {
          const GateApp& op = tab.app(odo[static_cast<std::size_t>(k)]);
          apply_gate_inplace(amps, lat.n_sites, gs.gate(op.gate), op.a, op.b);
        }
        images.push_back(std::move(amps));
      }
      if (ok(images)) return len;
      int pos = len - 1;
      while (pos >= 0 && odo[static_cast<std::size_t>(pos)] == m - 1) {
        odo[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++odo[static_cast<std::size_t>(pos)];
    }
  }
  return std::nullopt;
}

inline std::function<bool(const std::vector<std::vector<cplx>>&)> oracle_predicate(const Predicate& p) {
  return [p](const std::vector<std::vector<cplx>>& images) { return p.margin(images) >= -1e-9; };
}

}  // namespace branchlab::testing
