#include "branchlab/decomposition.hpp"

#include <cmath>
#include <stdexcept>

namespace branchlab {

ProjectorSpec ProjectorSpec::identity() { return ProjectorSpec{}; }

ProjectorSpec ProjectorSpec::basis_assignment(std::vector<int> sites, std::vector<int> bits) {
  if (sites.size() != bits.size() || sites.empty()) {
    throw std::invalid_argument("basis_assignment: sites/bits size mismatch");
  }
  ProjectorSpec p;
  p.kind_ = Kind::basis_assignment;
  p.sites_ = std::move(sites);
  p.bits_ = std::move(bits);
  return p;
}

ProjectorSpec ProjectorSpec::basis_subset(std::vector<std::size_t> indices) {
  ProjectorSpec p;
  p.kind_ = Kind::basis_subset;
  p.indices_ = std::move(indices);
  return p;
}

ProjectorSpec ProjectorSpec::pauli_eigenspace(Observable pauli_string, int sign) {
  if (pauli_string.kind() != Observable::Kind::pauli) {
    throw std::invalid_argument("pauli_eigenspace: needs a Pauli-string observable");
  }
  if (sign != 1 && sign != -1) throw std::invalid_argument("pauli_eigenspace: sign must be +-1");
  ProjectorSpec p;
  p.kind_ = Kind::pauli_eigenspace;
  p.pauli_ = std::move(pauli_string);
  p.sign_ = sign;
  return p;
}

ProjectorSpec ProjectorSpec::dense(int n_sites, std::vector<cplx> matrix) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (matrix.size() != dim * dim) throw std::invalid_argument("ProjectorSpec::dense: bad matrix size");
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (std::abs(matrix[i * dim + j] - std::conj(matrix[j * dim + i])) > 1e-10) {
        throw std::invalid_argument("ProjectorSpec::dense: not Hermitian");
      }
      cplx pp{0, 0};
      for (std::size_t k = 0; k < dim; ++k) pp += matrix[i * dim + k] * matrix[k * dim + j];
      if (std::abs(pp - matrix[i * dim + j]) > 1e-10) {
        throw std::invalid_argument("ProjectorSpec::dense: not idempotent");
      }
    }
  }
  ProjectorSpec p;
  p.kind_ = Kind::dense;
  p.n_sites_ = n_sites;
  p.matrix_ = std::move(matrix);
  return p;
}

std::string ProjectorSpec::describe() const {
  switch (kind_) {
    case Kind::identity:
      return "identity";
    case Kind::basis_assignment: {
      std::string s = "bits{";
      for (std::size_t k = 0; k < sites_.size(); ++k) {
        if (k) s += ",";
        s += "q" + std::to_string(sites_[k]) + "=" + std::to_string(bits_[k]);
      }
      return s + "}";
    }
    case Kind::basis_subset:
      return "subset(" + std::to_string(indices_.size()) + ")";
    case Kind::pauli_eigenspace:
      return std::string(sign_ > 0 ? "+" : "-") + pauli_.pauli_axes();
    case Kind::dense:
      return "dense";
  }
  return "?";
}

std::vector<cplx> ProjectorSpec::apply(const StateVector& s) const {
  const auto& in = s.amplitudes();
  const std::size_t dim = in.size();
  switch (kind_) {
    case Kind::identity:
      return in;
    case Kind::basis_assignment: {
      std::vector<cplx> out(dim, cplx{0, 0});
      for (std::size_t i = 0; i < dim; ++i) {
        bool keep = true;
        for (std::size_t k = 0; k < sites_.size(); ++k) {
          int q = sites_[k];
          if (q < 0 || q >= s.lattice().n_sites) throw std::out_of_range("basis_assignment: site out of range");
          if (bit_of(i, q) != bits_[k]) {
            keep = false;
            break;
          }
        }
        if (keep) out[i] = in[i];
      }
      return out;
    }
    case Kind::basis_subset: {
      std::vector<cplx> out(dim, cplx{0, 0});
      for (std::size_t i : indices_) {
        if (i >= dim) throw std::out_of_range("basis_subset: index out of range");
        out[i] = in[i];
      }
      return out;
    }
    case Kind::pauli_eigenspace: {
      std::vector<cplx> px = pauli_.apply(s);
      std::vector<cplx> out(dim);
      const double sg = sign_;
      for (std::size_t i = 0; i < dim; ++i) out[i] = 0.5 * (in[i] + sg * px[i]);
      return out;
    }
    case Kind::dense: {
      if (dim != (std::size_t{1} << n_sites_)) throw std::invalid_argument("dense projector: dimension mismatch");
      std::vector<cplx> out(dim, cplx{0, 0});
      for (std::size_t i = 0; i < dim; ++i) {
        cplx acc{0, 0};
        const cplx* row = &matrix_[i * dim];
        for (std::size_t j = 0; j < dim; ++j) acc += row[j] * in[j];
        out[i] = acc;
      }
      return out;
    }
  }
  throw std::logic_error("ProjectorSpec::apply: unreachable");
}

namespace {

double vec_norm(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cplx vec_inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

Decomposition::Decomposition(StateVector parent, std::vector<std::vector<cplx>> components,
                             std::vector<std::string> labels)
    : parent_(std::move(parent)), components_(std::move(components)), labels_(std::move(labels)) {
  if (components_.empty()) throw std::invalid_argument("Decomposition: no components");
  const std::size_t dim = parent_.dim();
  for (const auto& c : components_) {
    if (c.size() != dim) throw std::invalid_argument("Decomposition: component dimension mismatch");
  }

  std::vector<cplx> residual = parent_.amplitudes();
  for (const auto& c : components_) {
    for (std::size_t i = 0; i < dim; ++i) residual[i] -= c[i];
  }
  if (vec_norm(residual) > kReconstructionTol) {
    throw std::invalid_argument("Decomposition: components do not reconstruct the parent");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i + 1; j < components_.size(); ++j) {
      if (std::abs(vec_inner(components_[i], components_[j])) > kOrthogonalityTol) {
        throw std::invalid_argument("Decomposition: components not pairwise orthogonal");
      }
    }
  }

  weights_.reserve(components_.size());
  for (const auto& c : components_) {
    double n = vec_norm(c);
    weights_.push_back(n * n);
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < components_.size(); ++i) labels_.push_back("b" + std::to_string(i));
  }
  if (labels_.size() != components_.size()) throw std::invalid_argument("Decomposition: label count mismatch");
}

Decomposition Decomposition::trivial(const StateVector& parent) {
  return Decomposition(parent, {parent.amplitudes()}, {"all"});
}

StateVector Decomposition::normalized_component(std::size_t i) const {
  StateVector s(parent_.lattice(), components_[i]);
  StateVector out = s.normalized();
  out.set_label(labels_[i]);
  return out;
}

Decomposition make_decomposition(const StateVector& parent, const std::vector<ProjectorSpec>& projectors,
                                 double norm_floor) {
  if (projectors.empty()) throw std::invalid_argument("make_decomposition: no projectors");
  std::vector<std::vector<cplx>> comps;
  std::vector<std::string> labels;
  for (const ProjectorSpec& p : projectors) {
    std::vector<cplx> c = p.apply(parent);
    // Idempotence check on the parent's support.
    StateVector cs(parent.lattice(), c);
    std::vector<cplx> cc = p.apply(cs);
    double drift = 0;
    for (std::size_t i = 0; i < c.size(); ++i) drift += std::norm(cc[i] - c[i]);
    if (std::sqrt(drift) > 1e-8) throw std::invalid_argument("make_decomposition: projector not idempotent on parent");
    if (vec_norm(c) < norm_floor) continue;  // zero-norm components dropped
    comps.push_back(std::move(c));
    labels.push_back(p.describe());
  }
  if (comps.empty()) throw std::invalid_argument("make_decomposition: all components below the norm floor");
  return Decomposition(parent, std::move(comps), std::move(labels));
}

double expectation(const StateVector& s, const Observable& o) { return o.expectation(s); }

DecompositionExpectation expectation(const Decomposition& d, const Observable& o) {
  DecompositionExpectation out;
  out.full = o.expectation(d.parent());
  out.weights = d.weights();
  out.branch.reserve(d.size());
  double mean = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double e = o.expectation(d.normalized_component(i));
    out.branch.push_back(e);
    mean += out.weights[i] * e;
  }
  out.branch_mean = mean;
  out.off_diagonal = out.full - mean;
  return out;
}

}  // namespace branchlab
