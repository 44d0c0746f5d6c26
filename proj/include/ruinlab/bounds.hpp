#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ruinlab/analytics.hpp"
#include "ruinlab/model.hpp"

namespace ruinlab {

// Constants of the maximal inequality for compensated Poisson integrals.
// The defaults are placeholders for shape testing, not certified values.
struct NovikovConstants {
  double k1 = 8.0;
  double k2 = 8.0;
  double k3 = 8.0;
  bool user = false;
  bool operator==(const NovikovConstants&) const = default;
};

ValidationReport validate(const NovikovConstants& k, std::string_view key = "novikov");

enum class Regime { Small, Middle, Large };  // (0,1], (1,2], (2,inf)
const char* to_string(Regime r);
Regime regime_of(double alpha);

struct BoundConstants {
  double alpha = 0.0;
  Regime regime = Regime::Small;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double tail_integral = 0.0;  // int_{|x|>1} |x|^alpha nu_X(dx)
  bool prefactor_restored = false;
  bool operator==(const BoundConstants&) const = default;
};

// Throws Error{TailIntegralDiverges} when int_{|x|>1} |x|^alpha nu_X(dx) is not finite,
// Error{AlphaOutOfRange} for alpha <= 0.
BoundConstants bound_constants(const BusinessSpec& business, double alpha, const NovikovConstants& k = {});

enum class MomentSource { ClosedForm, MonteCarlo, UpperBound, Unavailable };
const char* to_string(MomentSource s);

struct Moment {
  double value = 0.0;
  double std_err = 0.0;
  MomentSource source = MomentSource::Unavailable;
  std::int64_t n = 0;
  std::string note;

  bool available() const { return source != MomentSource::Unavailable && std::isfinite(value); }
  bool operator==(const Moment&) const = default;
};

struct MomentSet {
  double alpha = 0.0;
  double horizon = 0.0;  // kInf for the infinite horizon
  Moment e_i_alpha;      // E I_T^alpha
  Moment e_j_half;       // E J_T^{alpha/2}, J = J(2)
  Moment e_j_alpha;      // E J_T(alpha)
  bool operator==(const MomentSet&) const = default;
};

// int_0^T exp(t psi(alpha)) dt; for T = inf requires psi(alpha) < 0
// (Error{InfiniteHorizonDivergent} otherwise).
double expected_j_alpha(const LaplaceExponent& psi, double alpha, double horizon);

enum class MomentMode { ClosedForm, MonteCarlo };

// Finite horizon spec.grid.horizon. E J_T(alpha) is exact in ClosedForm mode
// (Levy families only); the two other moments are always Monte Carlo over
// spec.n_paths paths.
MomentSet moments(const ExperimentSpec& spec, double alpha, MomentMode mode, unsigned threads = 0);

// T = inf: E J(alpha) = -1/psi(alpha); E I^alpha and E J^{alpha/2} are upper
// bounds from the integer moments n! / prod_k (-psi(k)) and Lyapunov's inequality.
MomentSet infinite_horizon_moments(const ReturnSpec& returns, double alpha);

struct BoundReport {
  BoundConstants constants;
  MomentSet moments;
  NovikovConstants novikov;
  BetaValue beta;
  bool alpha_below_beta = false;
  bool tail_integral_finite = true;
  std::vector<std::string> warnings;

  bool operator==(const BoundReport&) const = default;
};

BoundReport make_bound_report(const BusinessSpec& business, const MomentSet& moments, const BetaValue& beta,
                              const NovikovConstants& k = {});

// (C1 E I^alpha + C2 E J^{alpha/2} + C3 E J(alpha)) / y^alpha.
// Throw Error{AlphaOutOfRange} unless alpha < beta, Error{MomentUnavailable}
// when a moment with a nonzero constant is missing. The horizon of the
// moments selects the variant.
double finite_time_bound(const BoundReport& report, double y);
double infinite_time_bound(const BoundReport& report, double y);

}  // namespace ruinlab
