#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace branchlab {

using cplx = std::complex<double>;

// 1D open chain of qubits. Site q maps to bit q of the basis index, so
// amplitudes[i] multiplies |v_{n-1} ... v_1 v_0> with v_q = (i >> q) & 1.
struct LatticeSpec {
  int n_sites = 1;
  int max_sites = 14;

  LatticeSpec() = default;
  explicit LatticeSpec(int n, int max = 14);

  std::size_t dim() const { return std::size_t{1} << n_sites; }
  bool valid_site(int q) const { return q >= 0 && q < n_sites; }
  bool adjacent(int a, int b) const {
    return valid_site(a) && valid_site(b) && (a - b == 1 || b - a == 1);
  }
  friend bool operator==(const LatticeSpec& x, const LatticeSpec& y) {
    return x.n_sites == y.n_sites;
  }
};

class StateVector {
 public:
  StateVector() = default;
  StateVector(LatticeSpec lattice, std::vector<cplx> amplitudes);

  const LatticeSpec& lattice() const { return lattice_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::vector<cplx>& amplitudes() { return amps_; }
  std::size_t dim() const { return amps_.size(); }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  double norm() const;
  bool is_normalized(double tol = 1e-12) const;
  // Throws if the norm is below tol.
  StateVector normalized(double tol = 1e-14) const;

  static StateVector basis_state(const LatticeSpec& lat, std::size_t index);
  static StateVector from_bits(const LatticeSpec& lat, const std::string& bits);  // bits[q] = site q
  static StateVector ghz(const LatticeSpec& lat);
  static StateVector all_plus(const LatticeSpec& lat);

 private:
  LatticeSpec lattice_;
  std::vector<cplx> amps_;
  std::string label_;
};

// <a|b>. Throws on dimension mismatch.
cplx inner_product(const StateVector& a, const StateVector& b);

// |<a|b>| for normalized inputs; rays are equal iff this is ~1.
double fidelity(const StateVector& a, const StateVector& b);
bool same_ray(const StateVector& a, const StateVector& b, double tol = 1e-10);

// Bit value of site q in basis index i.
inline int bit_of(std::size_t i, int q) { return static_cast<int>((i >> q) & 1u); }

std::string basis_label(std::size_t index, int n_sites);  // site 0 first

}  // namespace branchlab
