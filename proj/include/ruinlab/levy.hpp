#pragma once

#include <functional>
#include <limits>

#include "ruinlab/model.hpp"
#include "ruinlab/rng.hpp"

namespace ruinlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using RealFn = std::function<double(double)>;

// E[f(Y) 1{lo < Y <= hi}] for a jump-size law.
double expect(const JumpSize& law, const RealFn& f, double lo = -kInf, double hi = kInf);

// int_{lo < x <= hi} f(x) nu(dx). Near the origin tempered-stable
// densities are singular, so f must vanish there fast enough (x^2 suffices).
double integrate_levy(const JumpFamily& nu, const RealFn& f, double lo = -kInf, double hi = kInf);

// nu(R \ {0}); infinite for tempered-stable measures with alpha >= 0 on a side.
double total_mass(const JumpFamily& nu);

double mean(const JumpSize& law);
// Bounds of the closed support.
double support_infimum(const JumpSize& law);
double support_supremum(const JumpSize& law);

// E exp(-alpha Y). Throws Error{DivergentMgf} at or beyond laplace_domain().
double laplace_transform(const JumpSize& law, double alpha);
// Supremum of alpha > 0 with E exp(-alpha Y) < inf (kInf when finite everywhere).
double laplace_domain(const JumpSize& law);

double sample(const JumpSize& law, RngStream& rng);

// Draws jumps of a Levy measure as a compound Poisson stream. Finite
// measures are sampled exactly; tempered-stable measures keep only jumps
// with |x| > cutoff and report the compensator of the discarded
// (cutoff, 1] band through band_drift().
class JumpSampler {
 public:
  JumpSampler() = default;
  JumpSampler(const JumpFamily& nu, double cutoff);

  double rate() const noexcept { return rate_; }
  bool empty() const noexcept { return rate_ == 0.0; }
  // int_{cutoff < |x| <= 1} x nu(dx) for truncated tempered-stable measures, else 0.
  double band_drift() const noexcept { return band_drift_; }
  double sample(RngStream& rng) const;

 private:
  struct Side {
    double lambda = 0.0;
    double alpha = 0.0;
    double mass_inner = 0.0;  // nu-mass on (cutoff, 1]
    double mass_outer = 0.0;  // nu-mass on (1, inf)
  };
  double sample_side(const Side& side, RngStream& rng) const;

  enum class Kind { None, Compound, Tempered } kind_ = Kind::None;
  JumpSize law_ = PointMassJumps{};
  double rate_ = 0.0;
  double band_drift_ = 0.0;
  double cutoff_ = 0.0;
  Side neg_, pos_;
};

}  // namespace ruinlab
