#include "ruinlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ruinlab/errors.hpp"
#include "ruinlab/quadrature.hpp"

namespace ruinlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// int_a^b f(x) dens(x) dx, split at the interior breakpoints.
double density_integral(const RealFn& dens, const RealFn& f, double a, double b, std::vector<double> breaks) {
  if (!(a < b)) return 0.0;
  std::vector<double> points{a};
  std::sort(breaks.begin(), breaks.end());
  for (double p : breaks) {
    if (p > a && p < b && std::isfinite(p)) points.push_back(p);
  }
  points.push_back(b);
  const RealFn integrand = [&](double x) {
    if (!std::isfinite(x)) return 0.0;
    const double d = dens(x);
    if (d == 0.0) return 0.0;
    const double fx = f(x);
    return fx == 0.0 ? 0.0 : fx * d;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i] < points[i + 1]) total += integrate(integrand, points[i], points[i + 1]);
  }
  return total;
}

// int over y in [a, b] of g(y) c y^{-(1+alpha)} e^{-lambda y}, with the
// density evaluated in log space so that tiny y does not overflow.
double tempered_side_integral(const RealFn& g, double c, double alpha, double lambda, double a, double b) {
  a = std::max(a, 0.0);
  if (!(a < b)) return 0.0;
  const double log_c = std::log(c);
  const RealFn integrand = [&](double y) {
    if (y <= 0.0 || !std::isfinite(y)) return 0.0;
    const double gy = g(y);
    if (gy == 0.0) return 0.0;
    const double log_term = std::log(std::abs(gy)) + log_c - (1.0 + alpha) * std::log(y) - lambda * y;
    return std::copysign(std::exp(log_term), gy);
  };
  std::vector<double> points{a};
  if (a < 1.0 && b > 1.0) points.push_back(1.0);
  points.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) total += integrate(integrand, points[i], points[i + 1]);
  return total;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::DivergentMgf, "Laplace transform requires alpha >= 0");
}

}  // namespace

double expect(const JumpSize& law, const RealFn& f, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  return std::visit(
      overloaded{
          [&](const ExponentialJumps& e) {
            const double r = e.rate;
            return density_integral([r](double x) { return r * std::exp(-r * x); }, f, std::max(lo, 0.0), hi,
                                    {1.0, 1.0 / r, 10.0 / r});
          },
          [&](const DoubleExponentialJumps& d) {
            double total = 0.0;
            if (d.p_up > 0.0) {
              const double r = d.rate_up;
              total += d.p_up * density_integral([r](double x) { return r * std::exp(-r * x); }, f,
                                                 std::max(lo, 0.0), hi, {1.0, 1.0 / r, 10.0 / r});
            }
            if (d.p_up < 1.0) {
              const double r = d.rate_down;
              total += (1.0 - d.p_up) * density_integral([r](double x) { return r * std::exp(r * x); }, f, lo,
                                                         std::min(hi, 0.0), {-1.0, -1.0 / r, -10.0 / r});
            }
            return total;
          },
          [&](const GaussianJumps& g) {
            const double m = g.mean;
            const double s = g.sd;
            const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
            return density_integral(
                [=](double x) {
                  const double z = (x - m) / s;
                  return norm * std::exp(-0.5 * z * z);
                },
                f, lo, hi, {-1.0, 0.0, 1.0, m - 8.0 * s, m, m + 8.0 * s});
          },
          [&](const PointMassJumps& p) { return (lo < p.value && p.value <= hi) ? f(p.value) : 0.0; },
      },
      law);
}

double integrate_levy(const JumpFamily& nu, const RealFn& f, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  return std::visit(overloaded{
                        [](const NoJumps&) { return 0.0; },
                        [&](const CompoundPoissonJumps& cp) { return cp.rate * expect(cp.size, f, lo, hi); },
                        [&](const TemperedStableJumps& ts) {
                          const RealFn mirrored = [&](double y) { return f(-y); };
                          const double neg =
                              tempered_side_integral(mirrored, ts.c_neg, ts.alpha_neg, ts.lambda_neg, -std::min(hi, 0.0), -lo);
                          const double pos =
                              tempered_side_integral(f, ts.c_pos, ts.alpha_pos, ts.lambda_pos, std::max(lo, 0.0), hi);
                          return neg + pos;
                        },
                    },
                    nu);
}

double total_mass(const JumpFamily& nu) {
  return std::visit(overloaded{
                        [](const NoJumps&) { return 0.0; },
                        [](const CompoundPoissonJumps& cp) { return cp.rate; },
                        [](const TemperedStableJumps& ts) {
                          if (ts.alpha_neg >= 0.0 || ts.alpha_pos >= 0.0) return kInf;
                          return ts.c_neg * std::pow(ts.lambda_neg, ts.alpha_neg) * std::tgamma(-ts.alpha_neg) +
                                 ts.c_pos * std::pow(ts.lambda_pos, ts.alpha_pos) * std::tgamma(-ts.alpha_pos);
                        },
                    },
                    nu);
}

double mean(const JumpSize& law) {
  return std::visit(overloaded{
                        [](const ExponentialJumps& e) { return 1.0 / e.rate; },
                        [](const DoubleExponentialJumps& d) {
                          return d.p_up / d.rate_up - (1.0 - d.p_up) / d.rate_down;
                        },
                        [](const GaussianJumps& g) { return g.mean; },
                        [](const PointMassJumps& p) { return p.value; },
                    },
                    law);
}

double support_infimum(const JumpSize& law) {
  return std::visit(overloaded{
                        [](const ExponentialJumps&) { return 0.0; },
                        [](const DoubleExponentialJumps& d) { return d.p_up < 1.0 ? -kInf : 0.0; },
                        [](const GaussianJumps&) { return -kInf; },
                        [](const PointMassJumps& p) { return p.value; },
                    },
                    law);
}

double support_supremum(const JumpSize& law) {
  return std::visit(overloaded{
                        [](const ExponentialJumps&) { return kInf; },
                        [](const DoubleExponentialJumps& d) { return d.p_up > 0.0 ? kInf : 0.0; },
                        [](const GaussianJumps&) { return kInf; },
                        [](const PointMassJumps& p) { return p.value; },
                    },
                    law);
}

double laplace_domain(const JumpSize& law) {
  if (const auto* d = std::get_if<DoubleExponentialJumps>(&law); d && d->p_up < 1.0) return d->rate_down;
  return kInf;
}

double laplace_transform(const JumpSize& law, double alpha) {
  check_alpha(alpha);
  if (alpha >= laplace_domain(law)) {
    throw Error(ErrorCode::DivergentMgf, "E exp(-alpha Y) is infinite for alpha = " + std::to_string(alpha));
  }
  return std::visit(overloaded{
                        [&](const ExponentialJumps& e) { return e.rate / (e.rate + alpha); },
                        [&](const DoubleExponentialJumps& d) {
                          double value = 0.0;
                          if (d.p_up > 0.0) value += d.p_up * d.rate_up / (d.rate_up + alpha);
                          if (d.p_up < 1.0) value += (1.0 - d.p_up) * d.rate_down / (d.rate_down - alpha);
                          return value;
                        },
                        [&](const GaussianJumps& g) {
                          return std::exp(-alpha * g.mean + 0.5 * alpha * alpha * g.sd * g.sd);
                        },
                        [&](const PointMassJumps& p) { return std::exp(-alpha * p.value); },
                    },
                    law);
}

double sample(const JumpSize& law, RngStream& rng) {
  return std::visit(overloaded{
                        [&](const ExponentialJumps& e) { return rng.exponential() / e.rate; },
                        [&](const DoubleExponentialJumps& d) {
                          const bool up = rng.uniform() < d.p_up;
                          const double e = rng.exponential();
                          return up ? e / d.rate_up : -e / d.rate_down;
                        },
                        [&](const GaussianJumps& g) { return g.mean + g.sd * rng.normal(); },
                        [](const PointMassJumps& p) { return p.value; },
                    },
                    law);
}

// ---------------------------------------------------------------------------

JumpSampler::JumpSampler(const JumpFamily& nu, double cutoff) {
  if (const auto* cp = std::get_if<CompoundPoissonJumps>(&nu)) {
    kind_ = Kind::Compound;
    law_ = cp->size;
    rate_ = cp->rate;
  } else if (const auto* ts = std::get_if<TemperedStableJumps>(&nu)) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "tempered-stable cutoff must lie in (0, 1)");
    }
    kind_ = Kind::Tempered;
    cutoff_ = cutoff;
    const RealFn one = [](double) { return 1.0; };
    const RealFn ident = [](double y) { return y; };
    auto make_side = [&](double c, double alpha, double lambda) {
      Side side;
      side.lambda = lambda;
      side.alpha = alpha;
      side.mass_inner = tempered_side_integral(one, c, alpha, lambda, cutoff, 1.0);
      side.mass_outer = tempered_side_integral(one, c, alpha, lambda, 1.0, kInf);
      return side;
    };
    neg_ = make_side(ts->c_neg, ts->alpha_neg, ts->lambda_neg);
    pos_ = make_side(ts->c_pos, ts->alpha_pos, ts->lambda_pos);
    rate_ = neg_.mass_inner + neg_.mass_outer + pos_.mass_inner + pos_.mass_outer;
    band_drift_ = tempered_side_integral(ident, ts->c_pos, ts->alpha_pos, ts->lambda_pos, cutoff, 1.0) -
                  tempered_side_integral(ident, ts->c_neg, ts->alpha_neg, ts->lambda_neg, cutoff, 1.0);
  }
}

double JumpSampler::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::None:
      return 0.0;
    case Kind::Compound:
      return ruinlab::sample(law_, rng);
    case Kind::Tempered: {
      const double neg_mass = neg_.mass_inner + neg_.mass_outer;
      if (rng.uniform() * rate_ < neg_mass) return -sample_side(neg_, rng);
      return sample_side(pos_, rng);
    }
  }
  return 0.0;
}

// Magnitude on (cutoff, inf) with density proportional to y^{-(1+alpha)} e^{-lambda y}.
double JumpSampler::sample_side(const Side& side, RngStream& rng) const {
  constexpr int kMaxTries = 10'000'000;
  const double alpha = side.alpha;
  const double lambda = side.lambda;
  if (rng.uniform() * (side.mass_inner + side.mass_outer) < side.mass_inner) {
    // Power-law proposal on (cutoff, 1], accepted with e^{-lambda (y - cutoff)}.
    const double eps_pow = std::pow(cutoff_, -alpha);
    for (int i = 0; i < kMaxTries; ++i) {
      const double u = rng.uniform();
      const double y = alpha == 0.0 ? std::pow(cutoff_, 1.0 - u) : std::pow(eps_pow - u * (eps_pow - 1.0), -1.0 / alpha);
      if (rng.uniform() < std::exp(-lambda * (y - cutoff_))) return y;
    }
  } else {
    // 1 + Exp(lambda / 2) proposal on (1, inf); the ratio y^k e^{-lambda y / 2}
    // is bounded by its value at the mode y_star.
    const double k = -1.0 - alpha;
    const double y_star = k > 0.0 ? std::max(1.0, 2.0 * k / lambda) : 1.0;
    for (int i = 0; i < kMaxTries; ++i) {
      const double y = 1.0 + 2.0 * rng.exponential() / lambda;
      const double log_ratio = k * std::log(y / y_star) - 0.5 * lambda * (y - y_star);
      if (rng.uniform() < std::exp(log_ratio)) return y;
    }
  }
  throw Error(ErrorCode::InvalidSpec, "tempered-stable rejection sampler failed to accept");
}

}  // namespace ruinlab
