#pragma once

#include <string>
#include <vector>

#include "branchlab/lattice.hpp"
#include "branchlab/observable.hpp"

namespace branchlab {

// Orthogonal projector acting on an n-site state.
class ProjectorSpec {
 public:
  enum class Kind { identity, basis_assignment, basis_subset, pauli_eigenspace, dense };

  static ProjectorSpec identity();
  // Projects onto basis states whose bits at `sites` equal `bits`.
  static ProjectorSpec basis_assignment(std::vector<int> sites, std::vector<int> bits);
  // Projects onto an explicit set of basis indices.
  static ProjectorSpec basis_subset(std::vector<std::size_t> indices);
  // (I + sign*P)/2 for a Pauli string P and sign in {+1, -1}.
  static ProjectorSpec pauli_eigenspace(Observable pauli_string, int sign);
  // Dense matrix, checked Hermitian and idempotent to 1e-10.
  static ProjectorSpec dense(int n_sites, std::vector<cplx> matrix);

  Kind kind() const { return kind_; }
  std::string describe() const;
  std::vector<cplx> apply(const StateVector& s) const;

 private:
  Kind kind_ = Kind::identity;
  std::vector<int> sites_;
  std::vector<int> bits_;
  std::vector<std::size_t> indices_;
  Observable pauli_ = Observable::pauli("I");
  int sign_ = 1;
  int n_sites_ = 0;
  std::vector<cplx> matrix_;
};

// Ordered pairwise-orthogonal unnormalized components summing to the parent.
// Invariants are checked at construction:
//   reconstruction residual <= 1e-10, pairwise overlaps <= 1e-10,
//   every kept component norm >= floor, weights sum to parent norm^2.
class Decomposition {
 public:
  static constexpr double kReconstructionTol = 1e-10;
  static constexpr double kOrthogonalityTol = 1e-10;
  static constexpr double kDefaultNormFloor = 1e-8;

  // Empty placeholder; real instances come from the validating constructor.
  Decomposition() = default;
  Decomposition(StateVector parent, std::vector<std::vector<cplx>> components,
                std::vector<std::string> labels = {});
  static Decomposition trivial(const StateVector& parent);

  const StateVector& parent() const { return parent_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<cplx>& component(std::size_t i) const { return components_[i]; }
  // |psi_i|^2
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  StateVector normalized_component(std::size_t i) const;
  const std::string& label(std::size_t i) const { return labels_[i]; }

 private:
  StateVector parent_;
  std::vector<std::vector<cplx>> components_;
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

// Components P_i|psi> with below-floor components dropped. Throws when the
// projectors fail orthogonality or completeness on the parent's support.
Decomposition make_decomposition(const StateVector& parent, const std::vector<ProjectorSpec>& projectors,
                                 double norm_floor = Decomposition::kDefaultNormFloor);

struct DecompositionExpectation {
  double full = 0;                    // <psi|O|psi>
  std::vector<double> branch;         // per-branch expectation on normalized components
  std::vector<double> weights;        // Born weights
  double branch_mean = 0;             // sum_i w_i * branch_i
  double off_diagonal = 0;            // full - branch_mean, equals sum_{i != j} <psi_i|O|psi_j>
};

double expectation(const StateVector& s, const Observable& o);
DecompositionExpectation expectation(const Decomposition& d, const Observable& o);

}  // namespace branchlab
