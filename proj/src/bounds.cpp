#include "ruinlab/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/levy.hpp"
#include "ruinlab/simulate.hpp"
#include "ruinlab/stats.hpp"

namespace ruinlab {

namespace {

const double kMinusOneOpen = std::nextafter(-1.0, -kInf);

Moment unavailable(std::string why) {
  Moment m;
  m.source = MomentSource::Unavailable;
  m.value = kInf;
  m.note = std::move(why);
  return m;
}

// E (int_0^inf e^{-k R_hat_s} ds)^n = n! / prod_{j<=n} (-psi(k j)), or unavailable.
Moment integer_moment_bound(const LaplaceExponent& psi, double scale, double power, const char* name) {
  const int n = std::max(1, static_cast<int>(std::ceil(power - 1e-12)));
  double log_moment = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double at = scale * j;
    if (!(at < psi.alpha_max)) {
      std::ostringstream why;
      why << name << ": psi(" << at << ") is outside the Laplace domain";
      return unavailable(why.str());
    }
    const double v = psi(at);
    if (!(v < 0.0)) {
      std::ostringstream why;
      why << name << ": psi(" << at << ") = " << v << " >= 0, integer moment of order " << n << " diverges";
      return unavailable(why.str());
    }
    log_moment += std::log(static_cast<double>(j)) - std::log(-v);
  }
  Moment m;
  m.source = MomentSource::UpperBound;
  m.value = std::exp(log_moment * power / n);
  std::ostringstream note;
  note << "Lyapunov bound from the integer moment of order " << n;
  m.note = note.str();
  return m;
}

void check_beta(const BoundReport& r) {
  if (!r.beta.known) throw Error(ErrorCode::AlphaOutOfRange, "critical exponent unknown; alpha < beta cannot be checked");
  if (!(r.constants.alpha < r.beta.value)) {
    std::ostringstream msg;
    msg << "alpha = " << r.constants.alpha << " is not below beta = " << r.beta.value;
    throw Error(ErrorCode::AlphaOutOfRange, msg.str());
  }
}

double assemble(const BoundReport& r, double y) {
  check_beta(r);
  if (!(y > 0.0)) throw Error(ErrorCode::InvalidSpec, "capital y must be > 0");
  const BoundConstants& c = r.constants;
  const MomentSet& m = r.moments;
  double total = 0.0;
  auto term = [&](double coeff, const Moment& mom, const char* name) {
    if (coeff == 0.0) return;
    if (!mom.available()) {
      throw Error(ErrorCode::MomentUnavailable, std::string(name) + ": " + (mom.note.empty() ? "not available" : mom.note));
    }
    total += coeff * mom.value;
  };
  term(c.c1, m.e_i_alpha, "E I^alpha");
  term(c.c2, m.e_j_half, "E J^{alpha/2}");
  term(c.c3, m.e_j_alpha, "E J(alpha)");
  return total / std::pow(y, c.alpha);
}

}  // namespace

ValidationReport validate(const NovikovConstants& k, std::string_view key) {
  ValidationReport report;
  const std::string base(key);
  auto check = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) report.fail(base + "." + name, std::string(name) + " must be >= 0");
  };
  check(k.k1, "K1");
  check(k.k2, "K2");
  check(k.k3, "K3");
  return report;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Small: return "(0,1]";
    case Regime::Middle: return "(1,2]";
    case Regime::Large: return "(2,inf)";
  }
  return "?";
}

Regime regime_of(double alpha) {
  if (alpha <= 1.0) return Regime::Small;
  if (alpha <= 2.0) return Regime::Middle;
  return Regime::Large;
}

const char* to_string(MomentSource s) {
  switch (s) {
    case MomentSource::ClosedForm: return "closed_form";
    case MomentSource::MonteCarlo: return "monte_carlo";
    case MomentSource::UpperBound: return "upper_bound";
    case MomentSource::Unavailable: return "unavailable";
  }
  return "?";
}

BoundConstants bound_constants(const BusinessSpec& business, double alpha, const NovikovConstants& k) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must be > 0");
  require_valid(validate(k));
  BoundConstants c;
  c.alpha = alpha;
  c.regime = regime_of(alpha);
  const JumpFamily& nu = business.jumps;
  const RealFn abs_pow = [alpha](double x) { return std::pow(std::abs(x), alpha); };
  try {
    c.tail_integral = integrate_levy(nu, abs_pow, -kInf, kMinusOneOpen) + integrate_levy(nu, abs_pow, 1.0, kInf);
  } catch (const Error& e) {
    throw Error(ErrorCode::TailIntegralDiverges, e.what());
  }
  if (!std::isfinite(c.tail_integral)) {
    throw Error(ErrorCode::TailIntegralDiverges, "int_{|x|>1} |x|^alpha nu_X(dx) is infinite");
  }
  const double small_sq = integrate_levy(nu, [](double x) { return x * x; }, kMinusOneOpen, 1.0);
  const double four = std::pow(4.0, alpha);
  const double drift_part = four * std::pow(std::abs(business.drift), alpha);
  const double brownian = std::pow(2.0, (5.0 * alpha + 2.0) / 2.0) * std::tgamma((alpha + 1.0) / 2.0) *
                          std::pow(business.sigma, alpha) / std::sqrt(std::numbers::pi);
  const double small_part = four * std::pow(small_sq, alpha / 2.0);
  switch (c.regime) {
    case Regime::Small:
      c.c1 = drift_part;
      c.c2 = brownian + k.k1 * small_part;
      c.c3 = four * c.tail_integral;
      break;
    case Regime::Middle:
      c.c1 = drift_part + four * std::pow(c.tail_integral, alpha);
      c.c2 = brownian + k.k1 * small_part;
      c.c3 = 0.0;
      c.prefactor_restored = true;
      break;
    case Regime::Large:
      c.c1 = drift_part + four * std::pow(c.tail_integral, alpha);
      c.c2 = brownian + k.k2 * small_part;
      c.c3 = k.k3 * four * integrate_levy(nu, abs_pow, kMinusOneOpen, 1.0);
      c.prefactor_restored = true;
      break;
  }
  return c;
}

double expected_j_alpha(const LaplaceExponent& psi, double alpha, double horizon) {
  const double v = psi(alpha);
  if (std::isinf(horizon)) {
    if (!(v < 0.0)) {
      std::ostringstream msg;
      msg << "psi(" << alpha << ") = " << v << " >= 0, E J_inf(alpha) diverges";
      throw Error(ErrorCode::InfiniteHorizonDivergent, msg.str());
    }
    return -1.0 / v;
  }
  if (v == 0.0) return horizon;
  return std::expm1(horizon * v) / v;
}

MomentSet moments(const ExperimentSpec& spec, double alpha, MomentMode mode, unsigned threads) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must be > 0");
  MomentSet out;
  out.alpha = alpha;
  out.horizon = spec.grid.horizon;

  PathOptions opts;
  opts.alphas = {alpha, 2.0};
  const PathEngine engine(spec, opts);
  const auto n = static_cast<std::uint64_t>(spec.n_paths);
  std::vector<double> i_pow(n), j_half(n), j_alpha(n);
  for_each_path(engine, 0, n, threads, [&](std::uint64_t idx, const PathWorkspace& ws) {
    const SimulatedPath& p = ws.path;
    i_pow[idx] = std::pow(p.i_func.back(), alpha);
    j_half[idx] = std::pow(p.j(2.0).back(), alpha / 2.0);
    j_alpha[idx] = p.j(alpha).back();
  });
  auto from_sample = [&](const std::vector<double>& xs) {
    const SampleMean s = sample_mean(xs);
    Moment m;
    m.value = s.mean;
    m.std_err = s.std_err;
    m.source = MomentSource::MonteCarlo;
    m.n = static_cast<std::int64_t>(s.n);
    return m;
  };
  out.e_i_alpha = from_sample(i_pow);
  out.e_j_half = from_sample(j_half);
  out.e_j_alpha = from_sample(j_alpha);
  if (mode == MomentMode::ClosedForm) {
    try {
      const LaplaceExponent psi = laplace_exponent(spec.returns);
      Moment m;
      m.value = expected_j_alpha(psi, alpha, spec.grid.horizon);
      m.source = MomentSource::ClosedForm;
      m.note = "int_0^T exp(t psi(alpha)) dt, " + psi.provenance;
      out.e_j_alpha = m;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DivergentMgf) {
        out.e_j_alpha = unavailable(e.what());
      } else if (e.code() != ErrorCode::Inapplicable) {
        throw;
      }
    }
  }
  return out;
}

MomentSet infinite_horizon_moments(const ReturnSpec& returns, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must be > 0");
  const LaplaceExponent psi = laplace_exponent(returns);
  MomentSet out;
  out.alpha = alpha;
  out.horizon = kInf;
  if (!(alpha < psi.alpha_max)) {
    throw Error(ErrorCode::InfiniteHorizonDivergent, "alpha is outside the Laplace domain");
  }
  Moment ja;
  ja.value = expected_j_alpha(psi, alpha, kInf);
  ja.source = MomentSource::ClosedForm;
  ja.note = "-1/psi(alpha), " + psi.provenance;
  out.e_j_alpha = ja;
  out.e_i_alpha = integer_moment_bound(psi, 1.0, alpha, "E I_inf^alpha");
  out.e_j_half = integer_moment_bound(psi, 2.0, alpha / 2.0, "E J_inf^{alpha/2}");
  return out;
}

BoundReport make_bound_report(const BusinessSpec& business, const MomentSet& moments, const BetaValue& beta,
                              const NovikovConstants& k) {
  BoundReport r;
  r.constants = bound_constants(business, moments.alpha, k);
  r.moments = moments;
  r.novikov = k;
  r.beta = beta;
  r.alpha_below_beta = beta.known && moments.alpha < beta.value;
  r.tail_integral_finite = std::isfinite(r.constants.tail_integral);
  if (!k.user) {
    r.warnings.push_back(
        "K1-K3 are default placeholders (8); the bound is for shape and monotonicity checks, not certified domination");
  }
  if (r.constants.regime == Regime::Middle) {
    r.warnings.push_back("U-term constant carries a restored 4^alpha prefactor");
  } else if (r.constants.regime == Regime::Large) {
    r.warnings.push_back("M^d-term constant carries a restored 4^alpha prefactor");
  }
  for (const Moment* m : {&moments.e_i_alpha, &moments.e_j_half, &moments.e_j_alpha}) {
    if (m->source == MomentSource::UpperBound) {
      r.warnings.push_back("some moments are upper bounds, so the bound is conservative");
      break;
    }
  }
  return r;
}

double finite_time_bound(const BoundReport& report, double y) {
  if (std::isinf(report.moments.horizon)) {
    throw Error(ErrorCode::Inapplicable, "moments are for the infinite horizon; use infinite_time_bound");
  }
  return assemble(report, y);
}

double infinite_time_bound(const BoundReport& report, double y) {
  if (!std::isinf(report.moments.horizon)) {
    throw Error(ErrorCode::Inapplicable, "moments are for a finite horizon; use finite_time_bound");
  }
  return assemble(report, y);
}

}  // namespace ruinlab
