#pragma once

#include <cstdint>
#include <vector>

#include "ruinlab/model.hpp"
#include "ruinlab/stats.hpp"

namespace ruinlab {

struct RunOptions {
  unsigned threads = 0;            // 0: all available cores
  std::uint64_t path_offset = 0;   // first stream index
};

struct RuinEstimate {
  double y = 0.0;
  double horizon = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t n_ruined = 0;
  std::uint64_t seed = 0;
  std::int64_t n_steps = 0;
  bool jump_adapted = true;
  bool operator==(const RuinEstimate&) const = default;
};

RuinEstimate make_estimate(double y, double horizon, std::int64_t n_ruined, std::int64_t n_paths, std::uint64_t seed,
                           const GridSpec& grid);

// sup over the grid of -Z_t, one entry per path (index order).
std::vector<double> simulate_sup(const ExperimentSpec& spec, const RunOptions& options = {});

// P(tau(y) <= T) for every capital in spec.capitals, on shared paths.
std::vector<RuinEstimate> mc_ruin_probability(const ExperimentSpec& spec, const RunOptions& options = {});

// Pools two runs over disjoint path ranges (same y, T, seed, grid).
std::vector<RuinEstimate> merge_estimates(const std::vector<RuinEstimate>& a, const std::vector<RuinEstimate>& b);

struct SlopeFit {
  std::vector<double> y;
  std::vector<double> log_p;  // ln p_hat, -inf when p_hat = 0
  std::vector<bool> used;     // n_ruined >= floor
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_err = 0.0;
  double beta_ref = 0.0;
  double gap = 0.0;  // slope + beta_ref
  std::int64_t floor = 50;
  bool operator==(const SlopeFit&) const = default;
};

// OLS of ln p_hat on ln y over points with n_ruined >= floor.
// Throws Error{InsufficientTail} with fewer than four usable points.
SlopeFit slope_fit(const std::vector<RuinEstimate>& estimates, double beta_ref, std::int64_t floor = 50);

// P(tau(y) <= T) for each T in horizons (increasing, within (0, spec T]) from
// one set of paths; the horizons are inserted into the grid.
std::vector<RuinEstimate> certain_ruin_probe(const ExperimentSpec& spec, double y, const std::vector<double>& horizons,
                                             const RunOptions& options = {});

struct BiasProbe {
  std::vector<double> y;
  std::vector<double> p_coarse;
  std::vector<double> p_fine;
  std::vector<double> delta;  // p_fine - p_coarse
  std::int64_t n_steps_coarse = 0;
  std::int64_t n_steps_fine = 0;
  bool operator==(const BiasProbe&) const = default;
};

// Discrete-monitoring bias estimate from n_steps vs 2 n_steps.
BiasProbe bias_probe(const ExperimentSpec& spec, const RunOptions& options = {});

struct SchemeComparison {
  std::vector<double> direct;          // sup(-Z), direct scheme
  std::vector<double> representation;  // sup(-Z), representation scheme
  double ks = 0.0;
  double critical = 0.0;
  double level = 0.01;
};

// Same return paths, independent business noise for each scheme.
SchemeComparison compare_schemes(const ExperimentSpec& spec, double level = 0.01, const RunOptions& options = {});

}  // namespace ruinlab
