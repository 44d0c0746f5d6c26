#include "ruinlab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/simulate.hpp"

namespace ruinlab {

namespace {

double sup_of_negative(const std::vector<double>& z) {
  double m = 0.0;
  for (double v : z) m = std::max(m, -v);
  return m;
}

std::int64_t count_above(const std::vector<double>& sups, double y) {
  std::int64_t k = 0;
  for (double m : sups) k += m > y ? 1 : 0;
  return k;
}

}  // namespace

RuinEstimate make_estimate(double y, double horizon, std::int64_t n_ruined, std::int64_t n_paths, std::uint64_t seed,
                           const GridSpec& grid) {
  RuinEstimate e;
  e.y = y;
  e.horizon = horizon;
  e.n_paths = n_paths;
  e.n_ruined = n_ruined;
  e.p_hat = n_paths > 0 ? static_cast<double>(n_ruined) / static_cast<double>(n_paths) : 0.0;
  const Interval ci = wilson_interval(n_ruined, n_paths);
  e.ci_low = ci.low;
  e.ci_high = ci.high;
  e.seed = seed;
  e.n_steps = grid.n_steps;
  e.jump_adapted = grid.jump_adapted;
  return e;
}

std::vector<double> simulate_sup(const ExperimentSpec& spec, const RunOptions& options) {
  const PathEngine engine(spec);
  const auto n = static_cast<std::uint64_t>(spec.n_paths);
  std::vector<double> sups(n);
  for_each_path(engine, options.path_offset, n, options.threads, [&](std::uint64_t idx, const PathWorkspace& ws) {
    sups[idx - options.path_offset] = sup_of_negative(ws.path.disc_integral);
  });
  return sups;
}

std::vector<RuinEstimate> mc_ruin_probability(const ExperimentSpec& spec, const RunOptions& options) {
  const std::vector<double> sups = simulate_sup(spec, options);
  std::vector<RuinEstimate> out;
  out.reserve(spec.capitals.size());
  for (double y : spec.capitals) {
    out.push_back(make_estimate(y, spec.grid.horizon, count_above(sups, y), spec.n_paths, spec.seed, spec.grid));
  }
  return out;
}

std::vector<RuinEstimate> merge_estimates(const std::vector<RuinEstimate>& a, const std::vector<RuinEstimate>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidSpec, "merge_estimates: runs cover different capitals");
  std::vector<RuinEstimate> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const RuinEstimate& x = a[i];
    const RuinEstimate& z = b[i];
    if (x.y != z.y || x.horizon != z.horizon || x.seed != z.seed || x.n_steps != z.n_steps ||
        x.jump_adapted != z.jump_adapted) {
      throw Error(ErrorCode::InvalidSpec, "merge_estimates: runs differ in y, T, seed or grid");
    }
    GridSpec grid;
    grid.n_steps = x.n_steps;
    grid.jump_adapted = x.jump_adapted;
    out.push_back(make_estimate(x.y, x.horizon, x.n_ruined + z.n_ruined, x.n_paths + z.n_paths, x.seed, grid));
  }
  return out;
}

SlopeFit slope_fit(const std::vector<RuinEstimate>& estimates, double beta_ref, std::int64_t floor) {
  SlopeFit fit;
  fit.beta_ref = beta_ref;
  fit.floor = floor;
  std::vector<double> lx, ly;
  for (const RuinEstimate& e : estimates) {
    fit.y.push_back(e.y);
    fit.log_p.push_back(e.p_hat > 0.0 ? std::log(e.p_hat) : -kInf);
    const bool use = e.n_ruined >= floor && e.p_hat > 0.0 && e.y > 0.0;
    fit.used.push_back(use);
    if (use) {
      lx.push_back(std::log(e.y));
      ly.push_back(std::log(e.p_hat));
    }
  }
  if (lx.size() < 4) {
    std::ostringstream msg;
    msg << lx.size() << " of " << estimates.size() << " capitals have n_ruined >= " << floor << "; need 4";
    throw Error(ErrorCode::InsufficientTail, msg.str());
  }
  const LinearFit lf = ols(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.slope_std_err = lf.slope_std_err;
  fit.gap = fit.slope + beta_ref;
  return fit;
}

std::vector<RuinEstimate> certain_ruin_probe(const ExperimentSpec& spec, double y, const std::vector<double>& horizons,
                                             const RunOptions& options) {
  if (horizons.empty()) throw Error(ErrorCode::InvalidSpec, "certain.horizons must not be empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0 && horizons[i] <= spec.grid.horizon)) {
      throw Error(ErrorCode::InvalidSpec, "certain.horizons must lie in (0, grid.T]");
    }
    if (i > 0 && !(horizons[i] > horizons[i - 1])) {
      throw Error(ErrorCode::InvalidSpec, "certain.horizons must be strictly increasing");
    }
  }
  if (!(y > 0.0)) throw Error(ErrorCode::InvalidSpec, "capital y must be > 0");
  PathOptions opts;
  opts.extra_times = horizons;
  const PathEngine engine(spec, opts);
  const auto n = static_cast<std::uint64_t>(spec.n_paths);
  const std::size_t nh = horizons.size();
  // first_hit[idx] = index of the first horizon by which the path is ruined (nh if never)
  std::vector<std::uint32_t> first_hit(n, static_cast<std::uint32_t>(nh));
  for_each_path(engine, options.path_offset, n, options.threads, [&](std::uint64_t idx, const PathWorkspace& ws) {
    const SimulatedPath& p = ws.path;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p.disc_integral[i] < -y) {
        const auto h = std::lower_bound(horizons.begin(), horizons.end(), p.times[i]);
        first_hit[idx - options.path_offset] = static_cast<std::uint32_t>(h - horizons.begin());
        break;
      }
    }
  });
  std::vector<std::int64_t> hits(nh + 1, 0);
  for (std::uint32_t h : first_hit) ++hits[h];
  std::vector<RuinEstimate> out;
  std::int64_t ruined = 0;
  for (std::size_t h = 0; h < nh; ++h) {
    ruined += hits[h];
    out.push_back(make_estimate(y, horizons[h], ruined, spec.n_paths, spec.seed, spec.grid));
  }
  return out;
}

BiasProbe bias_probe(const ExperimentSpec& spec, const RunOptions& options) {
  ExperimentSpec fine = spec;
  fine.grid.n_steps = spec.grid.n_steps * 2;
  const auto coarse_est = mc_ruin_probability(spec, options);
  const auto fine_est = mc_ruin_probability(fine, options);
  BiasProbe probe;
  probe.n_steps_coarse = spec.grid.n_steps;
  probe.n_steps_fine = fine.grid.n_steps;
  for (std::size_t i = 0; i < coarse_est.size(); ++i) {
    probe.y.push_back(coarse_est[i].y);
    probe.p_coarse.push_back(coarse_est[i].p_hat);
    probe.p_fine.push_back(fine_est[i].p_hat);
    probe.delta.push_back(fine_est[i].p_hat - coarse_est[i].p_hat);
  }
  return probe;
}

SchemeComparison compare_schemes(const ExperimentSpec& spec, double level, const RunOptions& options) {
  PathOptions opts;
  opts.representation = true;
  const PathEngine engine(spec, opts);
  const auto n = static_cast<std::uint64_t>(spec.n_paths);
  SchemeComparison out;
  out.level = level;
  out.direct.resize(n);
  out.representation.resize(n);
  for_each_path(engine, options.path_offset, n, options.threads, [&](std::uint64_t idx, const PathWorkspace& ws) {
    const std::uint64_t k = idx - options.path_offset;
    out.direct[k] = sup_of_negative(ws.path.disc_integral);
    const RepresentationPath& rep = ws.representation;
    double m = 0.0;
    for (std::size_t i = 0; i < rep.times.size(); ++i) m = std::max(m, -rep.total(i));
    out.representation[k] = m;
  });
  out.ks = ks_statistic(out.direct, out.representation);
  out.critical = ks_critical_value(out.direct.size(), out.representation.size(), level);
  return out;
}

}  // namespace ruinlab
