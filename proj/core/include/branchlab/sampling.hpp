#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchlab/decomposition.hpp"

namespace branchlab {

struct SamplingPlan {
  int n_samples = 1;
  std::uint64_t seed = 1;
  std::vector<Observable> observables;
};

// i.i.d. branch indices with P(i) proportional to the decomposition weights.
// Counter-based draws: the result is bit-identical for a given seed no
// matter how the work is chunked.
std::vector<int> sample_branches(const Decomposition& d, int n_samples, std::uint64_t seed);

struct ObservableCollapse {
  std::string label;
  int cost = 0;                // support-size proxy for observable cost
  double full = 0;             // <psi|O|psi>
  double branch_mean = 0;      // exact Born-weighted mean
  double sampled_mean = 0;
  double std_error = 0;        // sample std / sqrt(n)
  double residual = 0;         // full - branch_mean, signed
  std::vector<double> branch_values;
};

struct CollapseReport {
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> weights;
  std::vector<int> sample_counts;  // per-branch draw counts
  std::vector<ObservableCollapse> rows;
};

CollapseReport collapse_report(const Decomposition& d, const std::vector<Observable>& observables,
                               int n_samples, std::uint64_t seed);

}  // namespace branchlab
