#include "ruinlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <variant>

#include <CLI11.hpp>

#include "ruinlab/analytics.hpp"
#include "ruinlab/bounds.hpp"
#include "ruinlab/config.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/estimate.hpp"
#include "ruinlab/io.hpp"
#include "ruinlab/simulate.hpp"

namespace ruinlab::cli {

namespace {

struct Options {
  std::string config;
  std::string out = "./runs";
  std::uint64_t seed = 42;
  bool seed_given = false;
  unsigned threads = 0;
  std::vector<std::string> sets;
  bool bias_probe = false;
  std::int64_t dump_paths = 0;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Config load(const Options& o) {
  Json doc;
  try {
    doc = load_json_file(o.config);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptFile) throw Error(ErrorCode::InvalidSpec, std::string("config: ") + e.what());
    throw;
  }
  for (const std::string& s : o.sets) apply_override(doc, s);
  Config c = config_from_json(doc);
  c.overrides = o.sets;
  if (o.seed_given) c.spec.seed = o.seed;
  ValidationReport report = validate(c.spec);
  report.merge(validate(c.novikov));
  require_valid(report);
  return c;
}

// Only flags that change the numbers enter the run id; --threads does not.
std::string command_line(const std::string& name, const Options& o) {
  std::string cmd = name;
  if (o.bias_probe) cmd += " --bias-probe";
  if (o.dump_paths > 0) cmd += " --dump-paths " + std::to_string(o.dump_paths);
  return cmd;
}

std::string run_dir(const RunManifest& m, const Options& o) {
  return (std::filesystem::path(o.out) / m.run_id).string();
}

void print_estimates(const std::vector<RuinEstimate>& est, std::ostream& out) {
  out << "y\tT\tp_hat\tci_low\tci_high\tn_ruined/n_paths\n";
  for (const RuinEstimate& e : est) {
    out << fmt(e.y) << '\t' << fmt(e.horizon) << '\t' << fmt(e.p_hat) << '\t' << fmt(e.ci_low) << '\t'
        << fmt(e.ci_high) << '\t' << e.n_ruined << '/' << e.n_paths << '\n';
  }
}

void add_bias_probe(const Config& c, const RunOptions& ro, RunManifest& m, std::ostream& out) {
  const BiasProbe bp = bias_probe(c.spec, ro);
  m.reports["bias_probe"] = to_json(bp);
  out << "bias probe (n_steps " << bp.n_steps_coarse << " -> " << bp.n_steps_fine << ")\n";
  for (std::size_t i = 0; i < bp.y.size(); ++i) {
    out << "  y = " << fmt(bp.y[i]) << ": delta p_hat = " << fmt(bp.delta[i]) << '\n';
  }
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Config c = load(o);
  const RunOptions ro{o.threads, 0};
  RunManifest m = make_manifest(command_line("simulate", o), c);
  m.estimates = mc_ruin_probability(c.spec, ro);
  print_estimates(m.estimates, out);
  if (o.bias_probe) add_bias_probe(c, ro, m, out);
  write_run(m, o.out);
  const std::string dir = run_dir(m, o);
  if (o.dump_paths > 0) {
    PathOptions po;
    po.alphas = c.spec.alphas;
    const PathEngine engine(c.spec, po);
    PathWorkspace ws;
    const auto n = static_cast<std::uint64_t>(std::min(o.dump_paths, c.spec.n_paths));
    for (std::uint64_t k = 0; k < n; ++k) {
      engine.run(k, ws);
      write_path_dump(dir, k, ws.path);
    }
  }
  out << "run " << dir << '\n';
  return 0;
}

int cmd_beta(const Options& o, std::ostream& out) {
  const Config c = load(o);
  const BetaReport r = beta_report(c.spec.returns, c.spec.grid.horizon);
  RunManifest m = make_manifest(command_line("beta", o), c);
  m.reports["beta"] = to_json(r);
  out << "beta_T = ";
  if (r.beta_T.known) {
    out << fmt(r.beta_T.value) << (r.beta_T.lower_bound ? " (lower bound)" : "");
  } else {
    out << "unknown";
  }
  out << "  [" << r.beta_T.method << "]\n";
  out << "beta_inf = ";
  if (r.beta_inf.found) {
    out << fmt(r.beta_inf.root) << "  [" << r.beta_inf_method << ", residual " << fmt(r.beta_inf.residual) << "]\n";
  } else {
    out << "none (" << r.beta_inf.reason << ")\n";
  }
  write_run(m, o.out);
  out << "run " << run_dir(m, o) << '\n';
  return 0;
}

int cmd_certain(const Options& o, std::ostream& out) {
  const Config c = load(o);
  CertainRuinReport r;
  if (const auto* add = std::get_if<AdditiveReturns>(&c.spec.returns)) {
    AdditiveRuinOptions ao;
    ao.p = c.certain.p;
    ao.s_horizon = c.certain.s_horizon;
    ao.analytic_tail = c.certain.analytic_tail;
    r = certain_ruin_additive(*add, c.spec.business, ao);
  } else {
    r = certain_ruin_levy(c.spec.returns, c.spec.business, c.certain.p);
  }
  RunManifest m = make_manifest(command_line("certain", o), c);
  m.reports["certain"] = to_json(r);
  out << "verdict " << to_string(r.verdict) << ", D = " << fmt(r.drift_limit) << '\n';
  out << "  (i) " << (r.cond_i ? "holds" : "fails") << ", (ii) p = " << fmt(r.p_used) << " "
      << (r.cond_ii ? "holds" : "fails") << ", (iii) D < 0 " << (r.cond_iii ? "holds" : "fails") << '\n';
  if (!r.note.empty()) out << "  " << r.note << '\n';
  if (!c.certain.horizons.empty()) {
    const double y = c.certain.y.value_or(c.spec.capitals.front());
    m.estimates = certain_ruin_probe(c.spec, y, c.certain.horizons, RunOptions{o.threads, 0});
    print_estimates(m.estimates, out);
  }
  write_run(m, o.out);
  out << "run " << run_dir(m, o) << '\n';
  return 0;
}

int cmd_bound(const Options& o, std::ostream& out, std::ostream& err) {
  const Config c = load(o);
  if (c.spec.alphas.empty()) throw Error(ErrorCode::InvalidSpec, "alphas: at least one alpha is needed for a bound");
  const RunOptions ro{o.threads, 0};
  RunManifest m = make_manifest(command_line("bound", o), c);
  // The MC column is always P(tau <= T) on the grid horizon; for the infinite
  // horizon it is a lower proxy for P(tau < inf).
  const std::vector<RuinEstimate> mc = mc_ruin_probability(c.spec, ro);
  m.estimates = mc;

  BetaValue beta;
  if (c.bound.infinite_horizon) {
    const BetaReport br = beta_report(c.spec.returns, c.spec.grid.horizon);
    beta.known = br.beta_inf.found;
    beta.value = br.beta_inf.root;
    beta.method = br.beta_inf_method;
    beta.note = br.beta_inf.reason;
  } else {
    beta = beta_T_classifier(c.spec.returns, c.spec.grid.horizon);
  }

  Json reports = Json::array();
  Json failures = Json::array();
  for (double alpha : c.spec.alphas) {
    try {
      const MomentSet ms = c.bound.infinite_horizon ? infinite_horizon_moments(c.spec.returns, alpha)
                                                    : moments(c.spec, alpha, c.bound.moments, o.threads);
      const BoundReport r = make_bound_report(c.spec.business, ms, beta, c.novikov);
      std::vector<BoundRow> rows;
      for (std::size_t i = 0; i < c.spec.capitals.size(); ++i) {
        const double y = c.spec.capitals[i];
        const double b = c.bound.infinite_horizon ? infinite_time_bound(r, y) : finite_time_bound(r, y);
        rows.push_back({y, alpha, b, mc[i].p_hat, mc[i].ci_high});
      }
      m.bounds.insert(m.bounds.end(), rows.begin(), rows.end());
      reports.push_back(to_json(r));
      for (const std::string& w : r.warnings) err << "warning (alpha = " << fmt(alpha) << "): " << w << '\n';
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidSpec) throw;
      err << "alpha = " << fmt(alpha) << ": " << e.what() << '\n';
      failures.push_back({{"alpha", number_to_json(alpha)}, {"error", e.what()}});
    }
  }
  m.reports["bound"] = reports;
  if (!failures.empty()) m.reports["bound_failures"] = failures;

  out << "y\talpha\tbound\tmc_estimate\tmc_ci_hi\n";
  for (const BoundRow& r : m.bounds) {
    out << fmt(r.y) << '\t' << fmt(r.alpha) << '\t' << fmt(r.bound) << '\t' << fmt(r.mc_estimate) << '\t'
        << fmt(r.mc_ci_hi) << '\n';
  }
  // naive scan over the configured alphas
  Json best = Json::array();
  for (double y : c.spec.capitals) {
    const BoundRow* pick = nullptr;
    for (const BoundRow& r : m.bounds) {
      if (r.y == y && (!pick || r.bound < pick->bound)) pick = &r;
    }
    if (pick) {
      out << "best alpha at y = " << fmt(y) << ": " << fmt(pick->alpha) << " (bound " << fmt(pick->bound) << ")\n";
      best.push_back({{"y", number_to_json(y)}, {"alpha", number_to_json(pick->alpha)}, {"bound", number_to_json(pick->bound)}});
    }
  }
  m.reports["bound_best"] = best;
  write_run(m, o.out);
  out << "run " << run_dir(m, o) << '\n';
  return m.bounds.empty() ? 1 : 0;
}

int cmd_slope(const Options& o, std::ostream& out, std::ostream& err) {
  const Config c = load(o);
  const RunOptions ro{o.threads, 0};
  double beta_ref = 0.0;
  if (c.slope.beta_ref) {
    beta_ref = *c.slope.beta_ref;
  } else {
    const BetaValue b = beta_T_classifier(c.spec.returns, c.spec.grid.horizon);
    if (!b.known || !std::isfinite(b.value)) {
      throw Error(ErrorCode::InvalidSpec, "slope.beta_ref: required when beta_T is not a finite known value");
    }
    beta_ref = b.value;
  }
  RunManifest m = make_manifest(command_line("slope", o), c);
  m.estimates = mc_ruin_probability(c.spec, ro);
  print_estimates(m.estimates, out);
  if (o.bias_probe) add_bias_probe(c, ro, m, out);
  int code = 0;
  try {
    const SlopeFit fit = slope_fit(m.estimates, beta_ref, c.slope.floor);
    m.reports["slope"] = to_json(fit);
    out << "slope = " << fmt(fit.slope) << " +- " << fmt(fit.slope_std_err) << ", -beta_ref = " << fmt(-beta_ref)
        << ", gap = " << fmt(fit.gap) << '\n';
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTail) throw;
    m.reports["slope_error"] = e.what();
    err << e.what() << '\n';
    code = 1;
  }
  write_run(m, o.out);
  out << "run " << run_dir(m, o) << '\n';
  return code;
}

// ---------------------------------------------------------------------------
// validate: property suite on one spec.

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

void psi_checks(const ReturnSpec& returns, std::vector<Check>& checks) {
  if (std::holds_alternative<AdditiveReturns>(returns)) {
    checks.push_back({"psi", true, "skipped: no Laplace exponent for the additive family"});
    return;
  }
  const LaplaceExponent psi = laplace_exponent(returns);
  Check zero{"psi_at_zero", true, ""};
  const double z = psi(1e-8);
  zero.pass = std::abs(z) < 1e-6;
  zero.detail = "psi(1e-8) = " + fmt(z);
  checks.push_back(zero);

  RootResult root;
  try {
    root = find_beta_infinity(psi);
  } catch (const Error& e) {
    root.found = false;
    root.reason = e.what();
  }
  double upper = 10.0;
  if (std::isfinite(psi.alpha_max)) {
    upper = 0.999 * psi.alpha_max;
  } else if (root.found) {
    upper = 2.0 * root.root;
  }
  Check convex{"psi_convexity", true, ""};
  std::vector<double> v(51);
  v[0] = 0.0;
  for (int i = 1; i <= 50; ++i) v[i] = psi(upper * i / 50.0);
  int bad = 0;
  for (int i = 1; i < 50; ++i) {
    const double avg = 0.5 * (v[i - 1] + v[i + 1]);
    if (v[i] > avg + 1e-9 * std::max(1.0, std::abs(avg))) ++bad;
  }
  convex.pass = bad == 0;
  convex.detail = std::to_string(bad) + " midpoint violations on (0, " + fmt(upper) + "]";
  checks.push_back(convex);

  Check res{"beta_inf_residual", true, ""};
  if (root.found) {
    const double lo = psi(root.bracket_low), hi = psi(root.bracket_high);
    res.pass = std::abs(root.residual) <= 1e-9 && lo <= 0.0 && hi >= 0.0;
    res.detail = "beta_inf = " + fmt(root.root) + ", psi = " + fmt(root.residual);
  } else {
    res.detail = "skipped: " + root.reason;
  }
  checks.push_back(res);
}

void path_checks(const Config& c, unsigned threads, std::vector<Check>& checks) {
  ExperimentSpec spec = c.spec;
  spec.n_paths = std::min<std::int64_t>(spec.n_paths, 1000);
  PathOptions po;
  po.alphas = spec.alphas;
  const PathEngine engine(spec, po);
  const auto n = static_cast<std::uint64_t>(spec.n_paths);
  const double slack = 1e-9;
  std::vector<std::int64_t> cs_bad(n, 0), holder_bad(n, 0);
  std::vector<double> sup(n, 0.0);
  for_each_path(engine, 0, n, threads, [&](std::uint64_t k, const PathWorkspace& ws) {
    const SimulatedPath& p = ws.path;
    const std::vector<double>& j2 = p.j(2.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double t = p.times[i];
      if (p.i_func[i] > std::sqrt(t) * std::sqrt(j2[i]) + slack) ++cs_bad[k];
      for (double a : spec.alphas) {
        const double ja = p.j(a)[i];
        if (a < 2.0 && ja > std::pow(t, (2.0 - a) / 2.0) * std::pow(j2[i], a / 2.0) + slack) ++holder_bad[k];
        if (a > 2.0 && j2[i] > std::pow(t, (a - 2.0) / a) * std::pow(ja, 2.0 / a) + slack) ++holder_bad[k];
      }
      sup[k] = std::max(sup[k], -p.disc_integral[i]);
    }
  });
  std::int64_t cs = 0, hold = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    cs += cs_bad[k];
    hold += holder_bad[k];
  }
  checks.push_back({"pathwise_cauchy_schwarz", cs == 0, std::to_string(cs) + " violations over " + std::to_string(n) + " paths"});
  checks.push_back({"pathwise_holder", hold == 0, std::to_string(hold) + " violations over " + std::to_string(n) + " paths"});

  std::vector<double> ys = spec.capitals;
  std::sort(ys.begin(), ys.end());
  bool mono = true;
  std::int64_t prev = static_cast<std::int64_t>(n) + 1;
  for (double y : ys) {
    const auto hits = std::count_if(sup.begin(), sup.end(), [y](double s) { return s > y; });
    mono = mono && hits <= prev;
    prev = hits;
  }
  checks.push_back({"ruin_monotone_in_y", mono, "ruin counts over sorted capitals"});

  PathWorkspace a, b;
  engine.run(0, a);
  engine.run(0, b);
  const bool same = a.path.times == b.path.times && a.path.r_hat == b.path.r_hat &&
                    a.path.stoch_exp == b.path.stoch_exp && a.path.disc_integral == b.path.disc_integral;
  checks.push_back({"reproducible_path", same, "path 0 simulated twice"});

  // the suite itself may have run on one worker, so compare 1 against 4 explicitly
  std::vector<double> single(n), multi(n);
  auto sup_into = [&](std::vector<double>& dst, unsigned workers) {
    for_each_path(engine, 0, n, workers, [&](std::uint64_t k, const PathWorkspace& ws) {
      double s = 0.0;
      for (double z : ws.path.disc_integral) s = std::max(s, -z);
      dst[k] = s;
    });
  };
  sup_into(single, 1);
  sup_into(multi, 4);
  checks.push_back({"thread_count_invariance", single == multi && single == sup, "1 vs 4 workers"});
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Config c = load(o);
  std::vector<Check> checks;
  checks.push_back({"spec_valid", true, ""});
  psi_checks(c.spec.returns, checks);
  path_checks(c, o.threads, checks);
  RunManifest m = make_manifest(command_line("validate", o), c);
  Json doc = Json::array();
  bool ok = true;
  for (const Check& ch : checks) {
    out << (ch.pass ? "PASS " : "FAIL ") << ch.name << (ch.detail.empty() ? "" : ": " + ch.detail) << '\n';
    doc.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
    ok = ok && ch.pass;
  }
  m.reports["validate"] = doc;
  write_run(m, o.out);
  out << "run " << run_dir(m, o) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ruin probabilities with risky investment", "ruinlab"};
  app.require_subcommand(1, 1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file")->required();
    sub->add_option("--out", o.out, "output root; runs are written to <out>/<run id>")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed (overrides mc.seed)")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->capture_default_str();
    sub->add_option("--set", o.sets, "dotted override key=value, repeatable")->take_all()->allow_extra_args(false);
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ruin probabilities over the capitals");
  common(simulate);
  simulate->add_flag("--bias-probe", o.bias_probe, "also estimate the monitoring bias with 2 n_steps");
  simulate->add_option("--dump-paths", o.dump_paths, "write the first N paths to paths/<k>.csv")->check(CLI::NonNegativeNumber);
  CLI::App* bound = app.add_subcommand("bound", "ruin probability upper bound sweep over alphas and capitals");
  common(bound);
  CLI::App* beta = app.add_subcommand("beta", "critical exponents beta_T and beta_inf");
  common(beta);
  CLI::App* slope = app.add_subcommand("slope", "log-log tail slope of the ruin probability");
  common(slope);
  slope->add_flag("--bias-probe", o.bias_probe, "also estimate the monitoring bias with 2 n_steps");
  CLI::App* certain = app.add_subcommand("certain", "certain-ruin verdict and optional probe over horizons");
  common(certain);
  CLI::App* validate_cmd = app.add_subcommand("validate", "run the property suite on a configuration");
  common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->get_option("--seed")->count() > 0) o.seed_given = true;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (bound->parsed()) return cmd_bound(o, out, err);
    if (beta->parsed()) return cmd_beta(o, out);
    if (slope->parsed()) return cmd_slope(o, out, err);
    if (certain->parsed()) return cmd_certain(o, out);
    if (validate_cmd->parsed()) return cmd_validate(o, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.code() == ErrorCode::InvalidSpec ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ruinlab::cli
