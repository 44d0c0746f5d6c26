#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ruinlab {

// ---------------------------------------------------------------------------
// Jump-size laws of a compound Poisson component.

struct ExponentialJumps {  // density rate * exp(-rate x) on (0, inf)
  double rate = 1.0;
  bool operator==(const ExponentialJumps&) const = default;
};

// Upward Exp(rate_up) with probability p_up, downward -Exp(rate_down) otherwise.
struct DoubleExponentialJumps {
  double p_up = 0.5;
  double rate_up = 1.0;
  double rate_down = 1.0;
  bool operator==(const DoubleExponentialJumps&) const = default;
};

struct GaussianJumps {
  double mean = 0.0;
  double sd = 1.0;
  bool operator==(const GaussianJumps&) const = default;
};

struct PointMassJumps {
  double value = 0.0;
  bool operator==(const PointMassJumps&) const = default;
};

using JumpSize = std::variant<ExponentialJumps, DoubleExponentialJumps, GaussianJumps, PointMassJumps>;

// ---------------------------------------------------------------------------
// Levy measures.

struct NoJumps {
  bool operator==(const NoJumps&) const = default;
};

// nu(dx) = rate * P(size in dx)
struct CompoundPoissonJumps {
  double rate = 1.0;
  JumpSize size = ExponentialJumps{};
  bool operator==(const CompoundPoissonJumps&) const = default;
};

// nu(dx) = c_neg |x|^{-(1+alpha_neg)} e^{-lambda_neg |x|} 1{x<0}
//        + c_pos  x^{-(1+alpha_pos)}  e^{-lambda_pos x}   1{x>0}
// Covers Kou, CGMY and variance-gamma type tails.
struct TemperedStableJumps {
  double c_neg = 1.0;
  double c_pos = 1.0;
  double lambda_neg = 1.0;
  double lambda_pos = 1.0;
  double alpha_neg = 0.5;
  double alpha_pos = 0.5;
  bool operator==(const TemperedStableJumps&) const = default;
};

using JumpFamily = std::variant<NoJumps, CompoundPoissonJumps, TemperedStableJumps>;

// ---------------------------------------------------------------------------
// Business process X: Levy triplet (drift, sigma^2, nu) with truncation |x| <= 1.

struct BusinessSpec {
  double drift = 0.0;
  double sigma = 0.0;
  JumpFamily jumps = NoJumps{};
  bool operator==(const BusinessSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Return process R.

// R_t = drift t + sigma W_t.
struct BlackScholesReturns {
  double drift = 0.0;
  double sigma = 1.0;
  bool operator==(const BlackScholesReturns&) const = default;
};

// Levy R with jumps nu_R of R itself (support inside (-1, inf)). The drift
// is taken w.r.t. the truncation x 1{|ln(1+x)| <= 1}, so that
// E R_hat_1 = drift - sigma^2/2 + int (ln(1+x) - x 1{|ln(1+x)|<=1}) nu_R(dx).
struct LevyReturns {
  double drift = 0.0;
  double sigma = 0.0;
  JumpFamily jumps = NoJumps{};
  bool operator==(const LevyReturns&) const = default;
};

// Levy model for the log-return R_hat = ln E(R) directly.
// With compound Poisson jumps: R_hat_t = drift t + sigma W_t + sum_{n<=N_t} Y_n
// (no compensation). With tempered-stable jumps the triplet is taken w.r.t.
// the truncation |x| <= 1 and simulated with jumps of size > cutoff plus a
// compensating drift.
struct HatReturns {
  double drift = 0.0;
  double sigma = 0.0;
  JumpFamily jumps = NoJumps{};
  double cutoff = 1e-3;
  bool operator==(const HatReturns&) const = default;
};

// Positive weight function given by a piecewise-linear table.
struct PiecewiseLinear {
  std::vector<double> knots;
  std::vector<double> values;

  // Linear interpolation inside [front, back]; constant continuation outside.
  double operator()(double s) const;
  // int_a^b g(s) ds and int_a^b g(s)^2 ds (exact for the interpolant).
  double integral(double a, double b) const;
  double integral_sq(double a, double b) const;
  double max_value() const;
  double min_value() const;
  double last_knot() const { return knots.back(); }

  bool operator==(const PiecewiseLinear&) const = default;
};

// R_t = int_0^t g(s-) dL_s for a Levy driver L with triplet (drift, sigma^2, jumps).
struct AdditiveReturns {
  PiecewiseLinear weight;
  double drift = 0.0;
  double sigma = 0.0;
  JumpFamily jumps = NoJumps{};
  bool operator==(const AdditiveReturns&) const = default;
};

using ReturnSpec = std::variant<BlackScholesReturns, LevyReturns, HatReturns, AdditiveReturns>;

const char* return_family_name(const ReturnSpec& spec);

struct GridSpec {
  double horizon = 1.0;
  std::int64_t n_steps = 1000;
  bool jump_adapted = true;
  bool operator==(const GridSpec&) const = default;
};

struct ExperimentSpec {
  BusinessSpec business;
  ReturnSpec returns = BlackScholesReturns{};
  GridSpec grid;
  std::vector<double> capitals;
  std::int64_t n_paths = 1000;
  std::uint64_t seed = 42;
  std::vector<double> alphas;
  bool operator==(const ExperimentSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Validation.

struct Diagnostic {
  std::string key;  // dotted config path, e.g. "mc.n_paths"
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

struct ValidationReport {
  std::vector<Diagnostic> failures;

  bool ok() const { return failures.empty(); }
  void fail(std::string key, std::string message) { failures.push_back({std::move(key), std::move(message)}); }
  void merge(const ValidationReport& other);
  std::string summary() const;
};

ValidationReport validate_jumps(const JumpFamily& jumps, std::string_view key);
ValidationReport validate(const BusinessSpec& business, std::string_view key = "business");
ValidationReport validate(const ReturnSpec& returns, double horizon, std::string_view key = "returns");
ValidationReport validate(const GridSpec& grid, std::string_view key = "grid");
ValidationReport validate(const ExperimentSpec& spec);

// Throws Error{InvalidSpec} carrying the report summary.
void require_valid(const ValidationReport& report);

// delta_X = a_X + int_{|x|>1} x nu_X(dx).
double delta_x(const BusinessSpec& business);

}  // namespace ruinlab
