#include "branchlab/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "branchlab/parallel.hpp"
#include "branchlab/rng.hpp"

namespace branchlab {

std::vector<int> sample_branches(const Decomposition& d, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("sample_branches: n_samples must be >= 1");
  double total = 0;
  for (double w : d.weights()) total += w;
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("sample_branches: weights do not form a probability vector");
  }
  std::vector<double> cdf(d.size());
  double acc = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d.weight(i) / total;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  std::vector<int> out(static_cast<std::size_t>(n_samples));
  CounterRng rng(seed, 0xB0A4ULL);
  parallel_for_indexed(out.size(), [&](std::size_t k) {
    double u = rng.uniform(k);
    int idx = 0;
    while (u >= cdf[static_cast<std::size_t>(idx)] && idx + 1 < static_cast<int>(d.size())) ++idx;
    out[k] = idx;
  });
  return out;
}

CollapseReport collapse_report(const Decomposition& d, const std::vector<Observable>& observables,
                               int n_samples, std::uint64_t seed) {
  CollapseReport rep;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.weights = d.weights();

  std::vector<int> draws = sample_branches(d, n_samples, seed);
  rep.sample_counts.assign(d.size(), 0);
  for (int i : draws) rep.sample_counts[static_cast<std::size_t>(i)]++;

  for (const Observable& obs : observables) {
    DecompositionExpectation e = expectation(d, obs);
    ObservableCollapse row;
    row.label = obs.name();
    row.cost = obs.support();
    row.full = e.full;
    row.branch_mean = e.branch_mean;
    row.residual = e.off_diagonal;
    row.branch_values = e.branch;

    // Sampled estimator over the drawn branch values.
    double mean = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      mean += rep.sample_counts[i] * e.branch[i];
    }
    mean /= n_samples;
    double var = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double dev = e.branch[i] - mean;
      var += rep.sample_counts[i] * dev * dev;
    }
    var = n_samples > 1 ? var / (n_samples - 1) : 0.0;
    row.sampled_mean = mean;
    row.std_error = std::sqrt(var / n_samples);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace branchlab
