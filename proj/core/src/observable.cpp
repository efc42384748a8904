#include "branchlab/observable.hpp"

#include <cmath>
#include <stdexcept>

namespace branchlab {

namespace {
constexpr double kHermitianTol = 1e-12;
}

Observable Observable::pauli(const std::string& axes) {
  if (axes.empty() || axes.size() > 24) throw std::invalid_argument("Observable::pauli: bad axes length");
  for (char c : axes) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw std::invalid_argument("Observable::pauli: axes must be I/X/Y/Z");
    }
  }
  Observable o;
  o.kind_ = Kind::pauli;
  o.n_sites_ = static_cast<int>(axes.size());
  o.axes_ = axes;
  o.name_ = axes;
  return o;
}

Observable Observable::pauli_single(int n_sites, int site, char axis) {
  if (site < 0 || site >= n_sites) throw std::out_of_range("pauli_single: site out of range");
  std::string axes(static_cast<std::size_t>(n_sites), 'I');
  axes[static_cast<std::size_t>(site)] = axis;
  return pauli(axes);
}

Observable Observable::dense(int n_sites, std::vector<cplx> matrix, std::string name) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (matrix.size() != dim * dim) throw std::invalid_argument("Observable::dense: matrix size != dim^2");
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (std::abs(matrix[i * dim + j] - std::conj(matrix[j * dim + i])) > kHermitianTol) {
        throw std::invalid_argument("Observable::dense: matrix not Hermitian to 1e-12");
      }
    }
  }
  Observable o;
  o.kind_ = Kind::dense;
  o.n_sites_ = n_sites;
  o.matrix_ = std::move(matrix);
  o.name_ = std::move(name);
  return o;
}

int Observable::support() const {
  if (kind_ == Kind::dense) return n_sites_;
  int s = 0;
  for (char c : axes_) {
    if (c != 'I') ++s;
  }
  return s;
}

std::vector<cplx> Observable::apply(const StateVector& s) const {
  if (s.lattice().n_sites != n_sites_) throw std::invalid_argument("Observable::apply: dimension mismatch");
  const auto& in = s.amplitudes();
  const std::size_t dim = in.size();
  std::vector<cplx> out(dim, cplx{0, 0});
  if (kind_ == Kind::dense) {
    for (std::size_t i = 0; i < dim; ++i) {
      cplx acc{0, 0};
      const cplx* row = &matrix_[i * dim];
      for (std::size_t j = 0; j < dim; ++j) acc += row[j] * in[j];
      out[i] = acc;
    }
    return out;
  }
  // Pauli string: each basis state maps to exactly one basis state with a phase.
  std::size_t flip = 0;
  for (int q = 0; q < n_sites_; ++q) {
    char c = axes_[static_cast<std::size_t>(q)];
    if (c == 'X' || c == 'Y') flip |= std::size_t{1} << q;
  }
  const cplx im{0, 1};
  for (std::size_t j = 0; j < dim; ++j) {
    cplx phase{1, 0};
    for (int q = 0; q < n_sites_; ++q) {
      char c = axes_[static_cast<std::size_t>(q)];
      int v = bit_of(j, q);
      if (c == 'Z' && v) phase = -phase;
      if (c == 'Y') phase *= v ? -im : im;  // Y|0> = i|1>, Y|1> = -i|0>
    }
    out[j ^ flip] += phase * in[j];
  }
  return out;
}

cplx Observable::matrix_element_raw(const std::vector<cplx>& bra, const std::vector<cplx>& ket) const {
  const std::size_t dim = std::size_t{1} << n_sites_;
  if (bra.size() != dim || ket.size() != dim) throw std::invalid_argument("matrix_element: dimension mismatch");
  StateVector k(LatticeSpec(n_sites_), ket);
  std::vector<cplx> ok = apply(k);
  cplx acc{0, 0};
  for (std::size_t i = 0; i < dim; ++i) acc += std::conj(bra[i]) * ok[i];
  return acc;
}

cplx Observable::matrix_element(const StateVector& bra, const StateVector& ket) const {
  return matrix_element_raw(bra.amplitudes(), ket.amplitudes());
}

double Observable::expectation(const StateVector& s) const {
  cplx v = matrix_element(s, s);
  if (std::abs(v.imag()) > 1e-10) throw std::domain_error("expectation: imaginary part above 1e-10 (non-Hermitian input?)");
  return v.real();
}

}  // namespace branchlab
