#pragma once

#include <string>
#include <vector>

#include "branchlab/lattice.hpp"

namespace branchlab {

// Hermitian observable: either a Pauli string (fast path) or a dense matrix.
class Observable {
 public:
  enum class Kind { pauli, dense };

  // axes[q] in {I, X, Y, Z} for site q, e.g. "ZI" = Z on site 0 of a 2-site chain.
  static Observable pauli(const std::string& axes);
  static Observable pauli_single(int n_sites, int site, char axis);
  // Row-major dim x dim matrix, checked Hermitian to 1e-12.
  static Observable dense(int n_sites, std::vector<cplx> matrix, std::string name = "dense");

  Kind kind() const { return kind_; }
  int n_sites() const { return n_sites_; }
  const std::string& name() const { return name_; }
  // Number of non-identity sites; dense observables count every site.
  int support() const;
  const std::string& pauli_axes() const { return axes_; }

  std::vector<cplx> apply(const StateVector& s) const;  // O|psi>
  double expectation(const StateVector& s) const;       // <psi|O|psi>, real to 1e-10
  cplx matrix_element(const StateVector& bra, const StateVector& ket) const;
  cplx matrix_element_raw(const std::vector<cplx>& bra, const std::vector<cplx>& ket) const;

 private:
  Kind kind_ = Kind::pauli;
  int n_sites_ = 0;
  std::string name_;
  std::string axes_;          // pauli form
  std::vector<cplx> matrix_;  // dense form
};

}  // namespace branchlab
