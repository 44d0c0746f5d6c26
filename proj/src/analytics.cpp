#include "ruinlab/analytics.hpp"

#include <cmath>
#include <sstream>

#include "ruinlab/errors.hpp"
#include "ruinlab/quadrature.hpp"

namespace ruinlab {

namespace {

const double kMinusOneOpen = std::nextafter(-1.0, -kInf);
// |ln(1+x)| <= 1  <=>  x in [e^{-1} - 1, e - 1]
const double kLogBandLow = std::nextafter(std::exp(-1.0) - 1.0, -kInf);
const double kLogBandHigh = std::exp(1.0) - 1.0;

// e^{-alpha x} - 1 + alpha x 1{|x| <= 1}, without cancellation near 0.
double compensated_exp(double alpha, double x) {
  const double ax = alpha * x;
  if (std::abs(x) <= 1.0) {
    if (std::abs(ax) < 1e-4) return ax * ax * (0.5 - ax / 6.0 + ax * ax / 24.0);
    return std::expm1(-ax) + ax;
  }
  return std::expm1(-ax);
}

// int (e^{-alpha x} - 1 + alpha x 1{|x|<=1}) nu(dx) for a tempered-stable nu.
// Beyond |x| = 1 on the negative side e^{alpha |x|} is folded into the
// exponential tilt so that nothing overflows for alpha < lambda_neg.
double tempered_jump_exponent(const TemperedStableJumps& ts, double alpha) {
  const double inner = integrate_levy(ts, [alpha](double x) { return compensated_exp(alpha, x); }, kMinusOneOpen, 1.0);
  const double pos_tail = integrate_levy(ts, [alpha](double x) { return std::expm1(-alpha * x); }, 1.0, kInf);
  const double log_c = std::log(ts.c_neg);
  const RealFn neg = [&](double y) {
    if (!std::isfinite(y)) return 0.0;
    const double base = log_c - (1.0 + ts.alpha_neg) * std::log(y);
    return std::exp(base - (ts.lambda_neg - alpha) * y) - std::exp(base - ts.lambda_neg * y);
  };
  return inner + pos_tail + integrate(neg, 1.0, kInf);
}

double min_power(double v, double p) {
  const double a = std::abs(v);
  return std::min(a * a, std::pow(a, p));
}

bool brownian_business(const BusinessSpec& b, std::string& why) {
  if (!std::holds_alternative<NoJumps>(b.jumps)) {
    why = "business process has jumps; the criterion needs X = a_X t + sigma_X W";
    return false;
  }
  if (b.drift > 0.0) {
    why = "business drift a_X > 0";
    return false;
  }
  if (!(b.drift * b.drift + b.sigma > 0.0)) {
    why = "business process is identically zero";
    return false;
  }
  return true;
}

void finish(CertainRuinReport& r) {
  r.cond_iii = r.drift_limit < 0.0;
  r.verdict = (r.cond_i && r.cond_ii && r.cond_iii) ? Verdict::CertainRuin : Verdict::ConditionNotMet;
}

}  // namespace

double LaplaceExponent::operator()(double alpha) const {
  if (!(alpha < alpha_max)) {
    std::ostringstream msg;
    msg << "psi(" << alpha << ") is infinite (domain ends at " << alpha_max << ")";
    throw Error(ErrorCode::DivergentMgf, msg.str());
  }
  return fn(alpha);
}

LaplaceExponent laplace_exponent(const ReturnSpec& returns) {
  if (!std::holds_alternative<AdditiveReturns>(returns)) require_valid(validate(returns, 1.0));
  LaplaceExponent psi;
  if (const auto* bs = std::get_if<BlackScholesReturns>(&returns)) {
    const double a = bs->drift;
    const double s2 = bs->sigma * bs->sigma;
    psi.fn = [=](double al) { return -(a - 0.5 * s2) * al + 0.5 * s2 * al * al; };
    psi.provenance = "closed_form:black_scholes";
  } else if (const auto* lv = std::get_if<LevyReturns>(&returns)) {
    const double s2 = lv->sigma * lv->sigma;
    if (std::holds_alternative<NoJumps>(lv->jumps)) {
      const double a = lv->drift;
      psi.fn = [=](double al) { return -(a - 0.5 * s2) * al + 0.5 * s2 * al * al; };
      psi.provenance = "closed_form:black_scholes";
    } else if (const auto* cp = std::get_if<CompoundPoissonJumps>(&lv->jumps)) {
      const double rate = cp->rate;
      const JumpSize law = cp->size;
      const double small = expect(law, [](double x) { return x; }, kLogBandLow, kLogBandHigh);
      const double a = lv->drift - rate * small;
      psi.fn = [=](double al) {
        const double m = expect(law, [al](double x) { return std::pow(1.0 + x, -al); });
        return -(a - 0.5 * s2) * al + 0.5 * s2 * al * al + rate * (m - 1.0);
      };
      psi.provenance = std::holds_alternative<PointMassJumps>(law) ? "closed_form:levy_point_mass"
                                                                    : "quadrature:levy_compound_poisson";
    } else {
      throw Error(ErrorCode::Inapplicable, "levy returns take compound Poisson jumps only");
    }
  } else if (const auto* hat = std::get_if<HatReturns>(&returns)) {
    const double a = hat->drift;
    const double s2 = hat->sigma * hat->sigma;
    if (std::holds_alternative<NoJumps>(hat->jumps)) {
      psi.fn = [=](double al) { return -a * al + 0.5 * s2 * al * al; };
      psi.provenance = "closed_form:hat_diffusion";
    } else if (const auto* cp = std::get_if<CompoundPoissonJumps>(&hat->jumps)) {
      const double rate = cp->rate;
      const JumpSize law = cp->size;
      psi.alpha_max = laplace_domain(law);
      psi.fn = [=](double al) { return -a * al + 0.5 * s2 * al * al + rate * (laplace_transform(law, al) - 1.0); };
      psi.provenance = "closed_form:hat_compound_poisson";
    } else {
      const TemperedStableJumps ts = std::get<TemperedStableJumps>(hat->jumps);
      psi.alpha_max = ts.lambda_neg;
      psi.fn = [=](double al) { return -a * al + 0.5 * s2 * al * al + tempered_jump_exponent(ts, al); };
      psi.provenance = "quadrature:tempered_stable";
    }
  } else {
    throw Error(ErrorCode::Inapplicable, "R_hat is not a Levy process for the additive family");
  }
  return psi;
}

RootResult find_beta_infinity(const LaplaceExponent& psi) {
  RootResult out;
  constexpr double h = 1e-6;
  out.slope_at_zero = psi(h) / h;
  if (!(out.slope_at_zero < 0.0)) {
    out.reason = "psi'(0+) >= 0: no safety loading";
    return out;
  }
  double lo = h;
  double hi = 0.0;
  bool bracketed = false;
  auto probe = [&](double x) {
    const double v = psi(x);
    if (v == 0.0) {
      out.found = true;
      out.root = x;
      out.bracket_low = out.bracket_high = x;
      out.residual = 0.0;
      return true;
    }
    if (v > 0.0) {
      hi = x;
      bracketed = true;
      return true;
    }
    lo = x;
    return false;
  };
  if (std::isinf(psi.alpha_max)) {
    for (int k = 0; k <= 60 && !probe(std::ldexp(1.0, k));) {
      ++k;
    }
  } else {
    for (int k = 1; k <= 52 && !probe(psi.alpha_max * (1.0 - std::ldexp(1.0, -k)));) {
      ++k;
    }
  }
  if (out.found) return out;
  if (!bracketed) {
    if (std::isfinite(psi.alpha_max)) {
      std::ostringstream msg;
      msg << "psi < 0 on (0, " << psi.alpha_max << "); any root lies outside the domain of the Laplace transform";
      throw Error(ErrorCode::RootAtDomainBoundary, msg.str());
    }
    out.reason = "psi < 0 on every probe up to 2^60";
    return out;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++out.iterations;
    const double v = psi(mid);
    if (v == 0.0) {
      lo = hi = mid;
      break;
    }
    (v < 0.0 ? lo : hi) = mid;
  }
  out.found = true;
  out.bracket_low = lo;
  out.bracket_high = hi;
  out.root = 0.5 * (lo + hi);
  out.residual = psi(out.root);
  return out;
}

BetaValue beta_T_classifier(const ReturnSpec& returns, double horizon) {
  BetaValue b;
  if (std::holds_alternative<BlackScholesReturns>(returns)) {
    b.known = true;
    b.value = kInf;
    b.method = "black_scholes: psi finite for every alpha, so E J_T(alpha) = int_0^T exp(t psi(alpha)) dt < inf";
  } else if (const auto* lv = std::get_if<LevyReturns>(&returns)) {
    b.known = true;
    b.value = kInf;
    if (const auto* cp = std::get_if<CompoundPoissonJumps>(&lv->jumps)) {
      std::ostringstream m;
      m << "levy: jump support bounded below by " << support_infimum(cp->size)
        << " > -1, so int 1{|ln(1+x)|>1} (1+x)^{-alpha} nu_R(dx) < inf for every alpha";
      b.method = m.str();
    } else {
      b.method = "levy without jumps: psi finite for every alpha";
    }
  } else if (const auto* hat = std::get_if<HatReturns>(&returns)) {
    if (const auto* cp = std::get_if<CompoundPoissonJumps>(&hat->jumps)) {
      b.known = true;
      b.value = laplace_domain(cp->size);
      b.method = std::isinf(b.value) ? "hat compound Poisson: E exp(-alpha Y) < inf for every alpha"
                                     : "hat compound Poisson: alpha_max of E exp(-alpha Y)";
    } else if (const auto* ts = std::get_if<TemperedStableJumps>(&hat->jumps)) {
      if (ts->lambda_neg >= 2.0) {
        b.known = true;
        b.value = ts->lambda_neg;
        b.method = "tempered stable: lambda_1 >= 2 gives beta_T = lambda_1";
        b.note = "E(I_T^beta_T) = inf assumed, per divergence of the first tail integral at alpha = lambda_1";
      } else {
        b.known = false;
        b.method = "tempered stable: lambda_1 < 2 is unresolved";
      }
    } else {
      b.known = true;
      b.value = kInf;
      b.method = "hat diffusion: psi finite for every alpha";
    }
  } else {
    const auto& add = std::get<AdditiveReturns>(returns);
    // sup of g over [0, T]
    double g_max = add.weight(horizon);
    for (std::size_t i = 0; i < add.weight.knots.size() && add.weight.knots[i] <= horizon; ++i) {
      g_max = std::max(g_max, add.weight.values[i]);
    }
    const auto* cp = std::get_if<CompoundPoissonJumps>(&add.jumps);
    const double domain = cp ? laplace_domain(cp->size) : kInf;
    constexpr double kStep = 0.25;
    constexpr double kTop = 64.0;
    double best = 0.0;
    bool any = false;
    bool all = true;
    for (double alpha = 2.0; alpha <= kTop; alpha += kStep) {
      // the jump sizes have exponential tails, so the tail integral is finite
      // exactly when alpha g stays inside the Laplace domain
      if (!(alpha * g_max < domain)) {
        all = false;
        break;
      }
      best = alpha;
      any = true;
    }
    if (!any) {
      b.known = false;
      b.method = "additive: tail criterion fails already at alpha = 2";
    } else if (all && std::isinf(domain)) {
      b.known = true;
      b.value = kInf;
      b.method = "additive: int_0^T int_{x<-1} exp(-alpha x g(s)) nu_L(dx) ds < inf for every alpha";
    } else {
      b.known = true;
      b.value = best;
      b.lower_bound = true;
      b.method = "additive: largest alpha on the grid {2, 2.25, ...} with the tail criterion finite (lower bound)";
    }
  }
  return b;
}

BetaReport beta_report(const ReturnSpec& returns, double horizon) {
  BetaReport r;
  r.beta_T = beta_T_classifier(returns, horizon);
  try {
    const LaplaceExponent psi = laplace_exponent(returns);
    r.beta_inf_method = "bisection on " + psi.provenance;
    r.beta_inf = find_beta_infinity(psi);
  } catch (const Error& e) {
    r.beta_inf.found = false;
    r.beta_inf.reason = e.what();
    r.beta_inf_method = "none";
  }
  return r;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CertainRuin: return "certain_ruin";
    case Verdict::ConditionNotMet: return "condition_not_met";
    case Verdict::Inapplicable: return "inapplicable";
  }
  return "?";
}

CertainRuinReport certain_ruin_levy(const ReturnSpec& returns, const BusinessSpec& business, double p) {
  CertainRuinReport r;
  r.p_used = p;
  if (!(p > 1.0 && p < 2.0)) throw Error(ErrorCode::InvalidSpec, "p must lie in (1, 2)");
  if (!brownian_business(business, r.note)) return r;
  const RealFn ident = [](double x) { return x; };
  if (const auto* bs = std::get_if<BlackScholesReturns>(&returns)) {
    r.method = "levy corollary: black_scholes";
    r.drift_limit = bs->drift - 0.5 * bs->sigma * bs->sigma;
    r.integral_i = bs->sigma * bs->sigma;
  } else if (const auto* lv = std::get_if<LevyReturns>(&returns)) {
    r.method = "levy corollary: jump diffusion";
    const double s2 = lv->sigma * lv->sigma;
    r.integral_i = s2;
    const double jump_drift = integrate_levy(lv->jumps, [](double x) {
      const double l = std::log1p(x);
      return std::abs(l) <= 1.0 ? l - x : l;
    }, -1.0, kInf);
    r.drift_limit = lv->drift - 0.5 * s2 + jump_drift;
    r.integral_ii = integrate_levy(lv->jumps, [p](double x) { return min_power(std::log1p(x), p); }, -1.0, kInf) /
                    (p - 1.0);
  } else if (const auto* hat = std::get_if<HatReturns>(&returns)) {
    r.method = "levy corollary: R_hat given directly";
    const double s2 = hat->sigma * hat->sigma;
    r.integral_i = s2;
    if (std::holds_alternative<TemperedStableJumps>(hat->jumps)) {
      r.drift_limit = hat->drift + integrate_levy(hat->jumps, ident, -kInf, kMinusOneOpen) +
                      integrate_levy(hat->jumps, ident, 1.0, kInf);
    } else {
      r.drift_limit = hat->drift + integrate_levy(hat->jumps, ident);
    }
    r.integral_ii = integrate_levy(hat->jumps, [p](double x) { return min_power(x, p); }) / (p - 1.0);
  } else {
    r.note = "additive returns: use certain_ruin_additive";
    return r;
  }
  r.cond_i = std::isfinite(r.integral_i);
  r.cond_ii = std::isfinite(r.integral_ii);
  r.time_average = r.drift_limit;
  finish(r);
  return r;
}

CertainRuinReport certain_ruin_additive(const AdditiveReturns& returns, const BusinessSpec& business,
                                        const AdditiveRuinOptions& options) {
  CertainRuinReport r;
  const double p = options.p;
  r.p_used = p;
  if (!(p > 1.0 && p < 2.0)) throw Error(ErrorCode::InvalidSpec, "p must lie in (1, 2)");
  if (!(options.s_horizon > 0.0)) throw Error(ErrorCode::InvalidSpec, "s_horizon must be > 0");
  r.method = options.analytic_tail ? "additive: quadrature on the table, analytic constant tail"
                                   : "additive: time average on [0, s_horizon]";
  if (!brownian_business(business, r.note)) return r;

  const PiecewiseLinear& g = returns.weight;
  const double s2 = returns.sigma * returns.sigma;
  const double a_l = returns.drift;
  const JumpFamily& nu = returns.jumps;
  const double s_max = g.last_knot();
  const double g_end = g.values.back();

  // drift density of R_hat at weight value w
  auto drift_at = [&](double w) {
    const double jumps = integrate_levy(nu, [w](double x) {
      const double wx = w * x;
      return std::log1p(wx) - (std::abs(x) <= 1.0 ? wx : 0.0);
    }, kMinusOneOpen, kInf);
    return w * a_l - 0.5 * s2 * w * w + jumps;
  };
  auto jump_power = [&](double w) {
    return integrate_levy(nu, [w, p](double x) { return min_power(std::log1p(w * x), p); }, kMinusOneOpen, kInf);
  };
  // int_a^b f(s) ds split at the knots of g
  auto over_table = [&](const RealFn& f, double a, double b) {
    double total = 0.0;
    double left = a;
    for (double k : g.knots) {
      if (k <= left) continue;
      if (k >= b) break;
      total += integrate(f, left, k);
      left = k;
    }
    return total + integrate(f, left, b);
  };

  const RealFn qv = [&](double s) {
    const double w = g(s);
    return s2 * w * w / ((1.0 + s) * (1.0 + s));
  };
  r.integral_i = over_table(qv, 0.0, s_max) + s2 * g_end * g_end / (1.0 + s_max);
  r.cond_i = std::isfinite(r.integral_i);

  if (std::holds_alternative<NoJumps>(nu)) {
    r.integral_ii = 0.0;
  } else {
    const RealFn jp = [&](double s) { return jump_power(g(s)) / std::pow(1.0 + s, p); };
    r.integral_ii = over_table(jp, 0.0, s_max) + jump_power(g_end) * std::pow(1.0 + s_max, 1.0 - p) / (p - 1.0);
  }
  r.cond_ii = std::isfinite(r.integral_ii);

  const RealFn d = [&](double s) { return drift_at(g(s)); };
  auto average = [&](double horizon) {
    if (horizon <= s_max) return over_table(d, 0.0, horizon) / horizon;
    return (over_table(d, 0.0, s_max) + integrate(d, s_max, horizon)) / horizon;
  };
  r.time_average = average(options.s_horizon);
  if (options.analytic_tail) {
    r.drift_limit = drift_at(g_end);
  } else {
    const double earlier = average(options.s_horizon / 10.0);
    const double change = std::abs(r.time_average - earlier) / std::max(std::abs(r.time_average), 1e-300);
    if (change > 1e-4) {
      std::ostringstream msg;
      msg << "time-averaged drift moved by relative " << change << " over the last decade of S (" << earlier << " -> "
          << r.time_average << ")";
      throw Error(ErrorCode::HorizonInconclusive, msg.str());
    }
    r.drift_limit = r.time_average;
  }
  finish(r);
  return r;
}

}  // namespace ruinlab
