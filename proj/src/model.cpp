#include "ruinlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/levy.hpp"

namespace ruinlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string join(std::string_view prefix, std::string_view field) {
  std::string key(prefix);
  key += '.';
  key += field;
  return key;
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void validate_size(const JumpSize& size, const std::string& key, ValidationReport& report) {
  std::visit(overloaded{
                 [&](const ExponentialJumps& e) {
                   if (!positive(e.rate)) report.fail(join(key, "rate"), "rate must be > 0");
                 },
                 [&](const DoubleExponentialJumps& d) {
                   if (!(d.p_up >= 0.0 && d.p_up <= 1.0)) report.fail(join(key, "p_up"), "p_up must lie in [0, 1]");
                   if (!positive(d.rate_up)) report.fail(join(key, "rate_up"), "rate_up must be > 0");
                   if (!positive(d.rate_down)) report.fail(join(key, "rate_down"), "rate_down must be > 0");
                 },
                 [&](const GaussianJumps& g) {
                   if (!std::isfinite(g.mean)) report.fail(join(key, "mean"), "mean must be finite");
                   if (!positive(g.sd)) report.fail(join(key, "sd"), "sd must be > 0");
                 },
                 [&](const PointMassJumps& p) {
                   if (!std::isfinite(p.value)) report.fail(join(key, "value"), "value must be finite");
                 },
             },
             size);
}

bool infinite_activity(const TemperedStableJumps& ts) { return ts.alpha_neg >= 0.0 || ts.alpha_pos >= 0.0; }

const char* kSupportMessage = "jump support must lie in (−1, ∞)";

}  // namespace

// ---------------------------------------------------------------------------

double PiecewiseLinear::operator()(double s) const {
  if (s <= knots.front()) return values.front();
  if (s >= knots.back()) return values.back();
  const auto hi = std::upper_bound(knots.begin(), knots.end(), s);
  const std::size_t j = static_cast<std::size_t>(hi - knots.begin());
  const double w = (s - knots[j - 1]) / (knots[j] - knots[j - 1]);
  return values[j - 1] + w * (values[j] - values[j - 1]);
}

namespace {

// Sums a per-piece rule over [a, b] split at the knots.
template <class Rule>
double piecewise_sum(const PiecewiseLinear& g, double a, double b, Rule rule) {
  if (a == b) return 0.0;
  if (a > b) return -piecewise_sum(g, b, a, rule);
  double total = 0.0;
  double left = a;
  double g_left = g(a);
  for (double k : g.knots) {
    if (k <= left) continue;
    if (k >= b) break;
    const double g_k = g(k);
    total += rule(k - left, g_left, g_k);
    left = k;
    g_left = g_k;
  }
  total += rule(b - left, g_left, g(b));
  return total;
}

}  // namespace

double PiecewiseLinear::integral(double a, double b) const {
  return piecewise_sum(*this, a, b, [](double h, double u, double v) { return 0.5 * h * (u + v); });
}

double PiecewiseLinear::integral_sq(double a, double b) const {
  return piecewise_sum(*this, a, b, [](double h, double u, double v) { return h * (u * u + u * v + v * v) / 3.0; });
}

double PiecewiseLinear::max_value() const { return *std::max_element(values.begin(), values.end()); }
double PiecewiseLinear::min_value() const { return *std::min_element(values.begin(), values.end()); }

const char* return_family_name(const ReturnSpec& spec) {
  return std::visit(overloaded{
                        [](const BlackScholesReturns&) { return "black_scholes"; },
                        [](const LevyReturns&) { return "levy"; },
                        [](const HatReturns&) { return "hat"; },
                        [](const AdditiveReturns&) { return "additive"; },
                    },
                    spec);
}

// ---------------------------------------------------------------------------

void ValidationReport::merge(const ValidationReport& other) {
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (i) out << "; ";
    out << failures[i].key << ": " << failures[i].message;
  }
  return out.str();
}

void require_valid(const ValidationReport& report) {
  if (!report.ok()) throw Error(ErrorCode::InvalidSpec, report.summary());
}

ValidationReport validate_jumps(const JumpFamily& jumps, std::string_view key) {
  ValidationReport report;
  const std::string k(key);
  std::visit(overloaded{
                 [](const NoJumps&) {},
                 [&](const CompoundPoissonJumps& cp) {
                   if (!positive(cp.rate)) report.fail(join(k, "rate"), "rate must be > 0");
                   validate_size(cp.size, join(k, "size"), report);
                 },
                 [&](const TemperedStableJumps& ts) {
                   if (!positive(ts.c_neg)) report.fail(join(k, "c_neg"), "c_neg must be > 0");
                   if (!positive(ts.c_pos)) report.fail(join(k, "c_pos"), "c_pos must be > 0");
                   if (!positive(ts.lambda_neg)) report.fail(join(k, "lambda_neg"), "lambda_neg must be > 0");
                   if (!positive(ts.lambda_pos)) report.fail(join(k, "lambda_pos"), "lambda_pos must be > 0");
                   if (!(ts.alpha_neg < 2.0)) report.fail(join(k, "alpha_neg"), "alpha_neg must be < 2");
                   if (!(ts.alpha_pos < 2.0)) report.fail(join(k, "alpha_pos"), "alpha_pos must be < 2");
                   if (!report.ok()) return;
                   try {
                     const double m = integrate_levy(ts, [](double x) { return std::min(x * x, 1.0); });
                     if (!std::isfinite(m)) report.fail(k, "int min(x^2, 1) nu(dx) is not finite");
                   } catch (const Error& e) {
                     report.fail(k, std::string("int min(x^2, 1) nu(dx) failed: ") + e.what());
                   }
                 },
             },
             jumps);
  return report;
}

ValidationReport validate(const BusinessSpec& business, std::string_view key) {
  ValidationReport report;
  const std::string k(key);
  if (!std::isfinite(business.drift)) report.fail(join(k, "drift"), "drift must be finite");
  if (!(business.sigma >= 0.0) || !std::isfinite(business.sigma)) report.fail(join(k, "sigma"), "sigma must be ≥ 0");
  if (const auto* ts = std::get_if<TemperedStableJumps>(&business.jumps)) {
    report.fail(join(k, "jumps"), infinite_activity(*ts)
                                      ? "infinite-activity business jumps unsupported"
                                      : "tempered-stable business jumps unsupported; use compound_poisson");
    return report;
  }
  report.merge(validate_jumps(business.jumps, join(k, "jumps")));
  return report;
}

ValidationReport validate(const ReturnSpec& returns, double horizon, std::string_view key) {
  ValidationReport report;
  const std::string k(key);
  const std::string jk = join(k, "jumps");

  auto check_sigma = [&](double sigma, bool strict) {
    if (!std::isfinite(sigma) || (strict ? !(sigma > 0.0) : !(sigma >= 0.0))) {
      report.fail(join(k, "sigma"), strict ? "sigma must be > 0" : "sigma must be ≥ 0");
    }
  };
  auto check_drift = [&](double drift) {
    if (!std::isfinite(drift)) report.fail(join(k, "drift"), "drift must be finite");
  };

  std::visit(
      overloaded{
          [&](const BlackScholesReturns& bs) {
            check_drift(bs.drift);
            check_sigma(bs.sigma, true);
          },
          [&](const LevyReturns& lv) {
            check_drift(lv.drift);
            check_sigma(lv.sigma, false);
            if (std::holds_alternative<TemperedStableJumps>(lv.jumps)) {
              report.fail(jk, std::string(kSupportMessage) + "; give tempered-stable jumps on R_hat (type 'hat')");
              return;
            }
            const ValidationReport jr = validate_jumps(lv.jumps, jk);
            report.merge(jr);
            if (!jr.ok()) return;
            if (const auto* cp = std::get_if<CompoundPoissonJumps>(&lv.jumps)) {
              if (!(support_infimum(cp->size) > -1.0)) report.fail(join(jk, "size"), kSupportMessage);
            }
          },
          [&](const HatReturns& hat) {
            check_drift(hat.drift);
            check_sigma(hat.sigma, false);
            report.merge(validate_jumps(hat.jumps, jk));
            if (std::holds_alternative<TemperedStableJumps>(hat.jumps) && !(hat.cutoff > 0.0 && hat.cutoff < 1.0)) {
              report.fail(join(k, "cutoff"), "cutoff must lie in (0, 1)");
            }
          },
          [&](const AdditiveReturns& add) {
            check_drift(add.drift);
            check_sigma(add.sigma, false);
            const PiecewiseLinear& g = add.weight;
            const std::string gk = join(k, "weight");
            if (g.knots.size() < 2 || g.knots.size() != g.values.size()) {
              report.fail(gk, "weight table needs ≥ 2 knots with one value each");
              return;
            }
            for (std::size_t i = 1; i < g.knots.size(); ++i) {
              if (!(g.knots[i] > g.knots[i - 1])) {
                report.fail(gk, "weight knots must be strictly increasing");
                return;
              }
            }
            if (g.knots.front() != 0.0) report.fail(gk, "weight table must start at s = 0");
            if (!(g.knots.back() >= horizon)) report.fail(gk, "weight table must cover [0, T]; extrapolation is forbidden");
            for (double v : g.values) {
              if (!positive(v)) {
                report.fail(gk, "weight g must be > 0 on [0, T]");
                break;
              }
            }
            if (std::holds_alternative<TemperedStableJumps>(add.jumps)) {
              report.fail(jk, "tempered-stable drivers unsupported; use compound_poisson");
              return;
            }
            const ValidationReport jr = validate_jumps(add.jumps, jk);
            report.merge(jr);
            if (!jr.ok() || !report.ok()) return;
            if (const auto* cp = std::get_if<CompoundPoissonJumps>(&add.jumps)) {
              const double lower = support_infimum(cp->size);
              if (lower < 0.0 && !(lower * g.max_value() > -1.0)) {
                report.fail(join(jk, "size"), std::string(kSupportMessage) + " after weighting by g");
              }
            }
          },
      },
      returns);
  return report;
}

ValidationReport validate(const GridSpec& grid, std::string_view key) {
  ValidationReport report;
  const std::string k(key);
  if (!positive(grid.horizon)) report.fail(join(k, "T"), "T must be > 0");
  if (grid.n_steps < 1) report.fail(join(k, "n_steps"), "n_steps ≥ 1");
  return report;
}

ValidationReport validate(const ExperimentSpec& spec) {
  ValidationReport report;
  report.merge(validate(spec.business));
  report.merge(validate(spec.grid));
  report.merge(validate(spec.returns, spec.grid.horizon));
  for (std::size_t i = 0; i < spec.capitals.size(); ++i) {
    if (!positive(spec.capitals[i])) {
      report.fail("capitals", "capitals must be > 0");
      break;
    }
    if (i > 0 && !(spec.capitals[i] > spec.capitals[i - 1])) {
      report.fail("capitals", "capitals must be sorted strictly ascending");
      break;
    }
  }
  if (spec.n_paths < 1) report.fail("mc.n_paths", "n_paths ≥ 1");
  for (double a : spec.alphas) {
    if (!positive(a)) {
      report.fail("alphas", "alphas must be > 0");
      break;
    }
  }
  return report;
}

double delta_x(const BusinessSpec& business) {
  const RealFn ident = [](double x) { return x; };
  try {
    const double below = integrate_levy(business.jumps, ident, -kInf, std::nextafter(-1.0, -kInf));
    const double above = integrate_levy(business.jumps, ident, 1.0, kInf);
    return business.drift + below + above;
  } catch (const Error& e) {
    throw Error(ErrorCode::DivergentTailIntegral, e.what());
  }
}

}  // namespace ruinlab
