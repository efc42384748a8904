#include "branchlab/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "branchlab/rng.hpp"

namespace branchlab {

namespace {

constexpr double kUnitaryTol = 1e-12;

Gate single(const std::string& name, cplx m00, cplx m01, cplx m10, cplx m11) {
  Gate g;
  g.name = name;
  g.arity = 1;
  g.m[0] = m00;
  g.m[1] = m01;
  g.m[2] = m10;
  g.m[3] = m11;
  return g;
}

int gate_dim(const Gate& g) { return g.arity == 1 ? 2 : 4; }

bool is_unitary(const Gate& g) {
  int d = gate_dim(g);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      cplx s{0, 0};
      for (int k = 0; k < d; ++k) {
        s += std::conj(g.m[static_cast<std::size_t>(k * d + i)]) * g.m[static_cast<std::size_t>(k * d + j)];
      }
      cplx want = (i == j) ? cplx{1, 0} : cplx{0, 0};
      if (std::abs(s - want) > kUnitaryTol) return false;
    }
  }
  return true;
}

bool matrices_equal(const Gate& x, const Gate& y) {
  if (x.arity != y.arity) return false;
  int d = gate_dim(x);
  for (int i = 0; i < d * d; ++i) {
    if (std::abs(x.m[static_cast<std::size_t>(i)] - y.m[static_cast<std::size_t>(i)]) > kUnitaryTol) return false;
  }
  return true;
}

Gate adjoint(const Gate& g) {
  Gate out = g;
  int d = gate_dim(g);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out.m[static_cast<std::size_t>(i * d + j)] = std::conj(g.m[static_cast<std::size_t>(j * d + i)]);
    }
  }
  return out;
}

std::uint64_t mix_double(std::uint64_t h, double x) {
  // Round to a coarse grid so equivalent constructions hash alike.
  auto v = static_cast<std::int64_t>(std::llround(x * 1e12));
  return splitmix64(h ^ static_cast<std::uint64_t>(v));
}

}  // namespace

GateSet GateSet::standard() {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i{0, 1};
  const cplx t = std::polar(1.0, std::numbers::pi / 4.0);

  std::vector<Gate> singles;
  singles.push_back(single("H", r, r, r, -r));
  singles.push_back(single("T", 1, 0, 0, t));
  singles.push_back(single("Tdg", 1, 0, 0, std::conj(t)));
  singles.push_back(single("S", 1, 0, 0, i));
  singles.push_back(single("Sdg", 1, 0, 0, -i));
  singles.push_back(single("X", 0, 1, 1, 0));
  singles.push_back(single("Z", 1, 0, 0, -1));

  Gate cnot;
  cnot.name = "CNOT";
  cnot.arity = 2;
  // control = first site, target = second; local basis l = 2*v_a + v_b.
  cnot.m[0 * 4 + 0] = 1;
  cnot.m[1 * 4 + 1] = 1;
  cnot.m[2 * 4 + 3] = 1;
  cnot.m[3 * 4 + 2] = 1;

  return GateSet(std::move(singles), {cnot});
}

GateSet::GateSet(std::vector<Gate> singles, std::vector<Gate> twos)
    : singles_(std::move(singles)), twos_(std::move(twos)) {
  if (singles_.empty() && twos_.empty()) throw std::invalid_argument("GateSet: empty");
  for (const Gate& g : singles_) {
    if (g.arity != 1 || !is_unitary(g)) throw std::invalid_argument("GateSet: bad single-site gate " + g.name);
    if (g.cost < 1) throw std::invalid_argument("GateSet: cost must be >= 1");
  }
  for (const Gate& g : twos_) {
    if (g.arity != 2 || !is_unitary(g)) throw std::invalid_argument("GateSet: bad two-site gate " + g.name);
    if (g.cost < 1) throw std::invalid_argument("GateSet: cost must be >= 1");
  }

  int total = gate_count();
  inverse_.assign(static_cast<std::size_t>(total), -1);
  inverse_closed_ = true;
  for (int id = 0; id < total; ++id) {
    Gate inv = adjoint(gate(id));
    for (int j = 0; j < total; ++j) {
      if (gate(j).arity == inv.arity && gate(j).cost == gate(id).cost && matrices_equal(gate(j), inv)) {
        inverse_[static_cast<std::size_t>(id)] = j;
        break;
      }
    }
    if (inverse_[static_cast<std::size_t>(id)] < 0) inverse_closed_ = false;
  }

  unit_costs_ = true;
  max_cost_ = 1;
  std::uint64_t h = 0x42d19c3a9ef1b6c7ULL;
  for (int id = 0; id < total; ++id) {
    const Gate& g = gate(id);
    if (g.cost != 1) unit_costs_ = false;
    max_cost_ = std::max(max_cost_, g.cost);
    for (char c : g.name) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
    h = splitmix64(h ^ static_cast<std::uint64_t>(g.cost));
    int d = gate_dim(g);
    for (int k = 0; k < d * d; ++k) {
      h = mix_double(h, g.m[static_cast<std::size_t>(k)].real());
      h = mix_double(h, g.m[static_cast<std::size_t>(k)].imag());
    }
  }
  fingerprint_ = h;
}

const Gate& GateSet::gate(int id) const {
  if (id < 0 || id >= gate_count()) throw std::out_of_range("GateSet::gate: bad id");
  std::size_t k = static_cast<std::size_t>(id);
  return k < singles_.size() ? singles_[k] : twos_[k - singles_.size()];
}

std::optional<int> GateSet::find(const std::string& name) const {
  for (int id = 0; id < gate_count(); ++id) {
    if (gate(id).name == name) return id;
  }
  return std::nullopt;
}

std::optional<int> GateSet::inverse_of(int id) const {
  if (id < 0 || id >= gate_count()) return std::nullopt;
  int j = inverse_[static_cast<std::size_t>(id)];
  if (j < 0) return std::nullopt;
  return j;
}

int Circuit::cost(const GateSet& gs) const {
  int c = 0;
  for (const GateApp& op : ops) c += gs.gate(op.gate).cost;
  return c;
}

void validate_circuit(const Circuit& c, const GateSet& gs, const LatticeSpec& lat) {
  for (const GateApp& op : c.ops) {
    if (op.gate < 0 || op.gate >= gs.gate_count()) throw std::invalid_argument("circuit: unknown gate id");
    const Gate& g = gs.gate(op.gate);
    if (g.arity == 1) {
      if (!lat.valid_site(op.a) || op.b != -1) throw std::out_of_range("circuit: bad site for " + g.name);
    } else {
      if (!lat.adjacent(op.a, op.b)) throw std::out_of_range("circuit: two-site gate " + g.name + " needs an adjacent pair");
    }
  }
}

void apply_gate_inplace(std::vector<cplx>& amps, int n_sites, const Gate& g, int a, int b) {
  const std::size_t dim = amps.size();
  if (g.arity == 1) {
    const std::size_t bit = std::size_t{1} << a;
    for (std::size_t base = 0; base < dim; ++base) {
      if (base & bit) continue;
      const std::size_t i0 = base;
      const std::size_t i1 = base | bit;
      const cplx x0 = amps[i0];
      const cplx x1 = amps[i1];
      amps[i0] = g.m[0] * x0 + g.m[1] * x1;
      amps[i1] = g.m[2] * x0 + g.m[3] * x1;
    }
    return;
  }
  (void)n_sites;
  const std::size_t bit_a = std::size_t{1} << a;
  const std::size_t bit_b = std::size_t{1} << b;
  for (std::size_t base = 0; base < dim; ++base) {
    if ((base & bit_a) || (base & bit_b)) continue;
    std::size_t idx[4];
    idx[0] = base;              // v_a=0 v_b=0
    idx[1] = base | bit_b;      // v_a=0 v_b=1
    idx[2] = base | bit_a;      // v_a=1 v_b=0
    idx[3] = base | bit_a | bit_b;
    cplx x[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      cplx s{0, 0};
      for (int k = 0; k < 4; ++k) s += g.m[static_cast<std::size_t>(r * 4 + k)] * x[k];
      amps[idx[r]] = s;
    }
  }
}

StateVector apply_circuit(const StateVector& state, const Circuit& c, const GateSet& gs) {
  validate_circuit(c, gs, state.lattice());
  std::vector<cplx> amps = state.amplitudes();
  for (const GateApp& op : c.ops) {
    apply_gate_inplace(amps, state.lattice().n_sites, gs.gate(op.gate), op.a, op.b);
  }
  return StateVector(state.lattice(), std::move(amps));
}

Circuit inverse_circuit(const Circuit& c, const GateSet& gs) {
  if (!gs.inverse_closed()) throw std::domain_error("inverse_circuit: gate set is not inverse closed");
  Circuit out;
  out.ops.reserve(c.ops.size());
  for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) {
    GateApp op = *it;
    op.gate = static_cast<std::int16_t>(*gs.inverse_of(op.gate));
    out.ops.push_back(op);
  }
  return out;
}

InstructionTable::InstructionTable(const GateSet& gs, const LatticeSpec& lat) : gs_(&gs), lat_(lat) {
  for (int q = 0; q < lat.n_sites; ++q) {
    for (std::size_t k = 0; k < gs.singles().size(); ++k) {
      GateApp op;
      op.gate = static_cast<std::int16_t>(k);
      op.a = static_cast<std::int16_t>(q);
      op.b = -1;
      apps_.push_back(op);
      costs_.push_back(gs.singles()[k].cost);
    }
  }
  for (int p = 0; p + 1 < lat.n_sites; ++p) {
    for (std::size_t k = 0; k < gs.twos().size(); ++k) {
      int id = static_cast<int>(gs.singles().size() + k);
      GateApp fwd;
      fwd.gate = static_cast<std::int16_t>(id);
      fwd.a = static_cast<std::int16_t>(p);
      fwd.b = static_cast<std::int16_t>(p + 1);
      apps_.push_back(fwd);
      costs_.push_back(gs.twos()[k].cost);
      GateApp rev = fwd;
      rev.a = static_cast<std::int16_t>(p + 1);
      rev.b = static_cast<std::int16_t>(p);
      apps_.push_back(rev);
      costs_.push_back(gs.twos()[k].cost);
    }
  }

  inverse_.assign(apps_.size(), -1);
  for (std::size_t i = 0; i < apps_.size(); ++i) {
    auto inv_gate = gs.inverse_of(apps_[i].gate);
    if (!inv_gate) continue;
    for (std::size_t j = 0; j < apps_.size(); ++j) {
      if (apps_[j].gate == static_cast<std::int16_t>(*inv_gate) && apps_[j].a == apps_[i].a &&
          apps_[j].b == apps_[i].b) {
        inverse_[i] = static_cast<int>(j);
        break;
      }
    }
  }
}

}  // namespace branchlab
