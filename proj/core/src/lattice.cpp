#include "branchlab/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace branchlab {

LatticeSpec::LatticeSpec(int n, int max) : n_sites(n), max_sites(max) {
  if (n < 1 || n > max) {
    throw std::invalid_argument("LatticeSpec: n_sites " + std::to_string(n) +
                                " outside [1, " + std::to_string(max) + "]");
  }
}

StateVector::StateVector(LatticeSpec lattice, std::vector<cplx> amplitudes)
    : lattice_(lattice), amps_(std::move(amplitudes)) {
  if (amps_.size() != lattice_.dim()) {
    throw std::invalid_argument("StateVector: amplitude count does not match 2^n_sites");
  }
  for (const cplx& a : amps_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("StateVector: non-finite amplitude");
    }
  }
}

double StateVector::norm() const {
  double s = 0;
  for (const cplx& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::normalized(double tol) const {
  double n = norm();
  if (n < tol) throw std::domain_error("StateVector::normalized: zero-norm state");
  std::vector<cplx> out(amps_);
  for (cplx& a : out) a /= n;
  StateVector s(lattice_, std::move(out));
  s.set_label(label_);
  return s;
}

StateVector StateVector::basis_state(const LatticeSpec& lat, std::size_t index) {
  if (index >= lat.dim()) throw std::out_of_range("basis_state: index out of range");
  std::vector<cplx> a(lat.dim(), cplx{0, 0});
  a[index] = 1.0;
  StateVector s(lat, std::move(a));
  s.set_label("|" + basis_label(index, lat.n_sites) + ">");
  return s;
}

StateVector StateVector::from_bits(const LatticeSpec& lat, const std::string& bits) {
  if (static_cast<int>(bits.size()) != lat.n_sites) {
    throw std::invalid_argument("from_bits: bit string length != n_sites");
  }
  std::size_t index = 0;
  for (int q = 0; q < lat.n_sites; ++q) {
    char c = bits[static_cast<std::size_t>(q)];
    if (c != '0' && c != '1') throw std::invalid_argument("from_bits: bits must be 0/1");
    if (c == '1') index |= std::size_t{1} << q;
  }
  return basis_state(lat, index);
}

StateVector StateVector::ghz(const LatticeSpec& lat) {
  std::vector<cplx> a(lat.dim(), cplx{0, 0});
  const double r = 1.0 / std::sqrt(2.0);
  a[0] = r;
  a[lat.dim() - 1] = r;
  StateVector s(lat, std::move(a));
  s.set_label("ghz" + std::to_string(lat.n_sites));
  return s;
}

StateVector StateVector::all_plus(const LatticeSpec& lat) {
  const double r = 1.0 / std::sqrt(static_cast<double>(lat.dim()));
  std::vector<cplx> a(lat.dim(), cplx{r, 0});
  StateVector s(lat, std::move(a));
  s.set_label("plus" + std::to_string(lat.n_sites));
  return s;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  cplx s{0, 0};
  const auto& av = a.amplitudes();
  const auto& bv = b.amplitudes();
  for (std::size_t i = 0; i < av.size(); ++i) s += std::conj(av[i]) * bv[i];
  return s;
}

double fidelity(const StateVector& a, const StateVector& b) { return std::abs(inner_product(a, b)); }

bool same_ray(const StateVector& a, const StateVector& b, double tol) {
  return fidelity(a, b) >= 1.0 - tol;
}

std::string basis_label(std::size_t index, int n_sites) {
  std::string s(static_cast<std::size_t>(n_sites), '0');
  for (int q = 0; q < n_sites; ++q) {
    if (bit_of(index, q)) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

}  // namespace branchlab
