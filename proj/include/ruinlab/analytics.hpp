#pragma once

#include <functional>
#include <string>

#include "ruinlab/levy.hpp"
#include "ruinlab/model.hpp"

namespace ruinlab {

// psi(alpha) = ln E exp(-alpha R_hat_1), finite on (0, alpha_max).
struct LaplaceExponent {
  std::function<double(double)> fn;
  std::string provenance;
  double alpha_max = kInf;

  // Throws Error{DivergentMgf} for alpha >= alpha_max.
  double operator()(double alpha) const;
};

// Throws Error{Inapplicable} for the additive family.
LaplaceExponent laplace_exponent(const ReturnSpec& returns);

struct RootResult {
  bool found = false;
  double root = 0.0;
  std::string reason;  // why no root was reported
  double slope_at_zero = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool operator==(const RootResult&) const = default;
};

// Positive root of psi by bisection. Throws Error{RootAtDomainBoundary} when
// psi stays negative up to a finite alpha_max.
RootResult find_beta_infinity(const LaplaceExponent& psi);

struct BetaValue {
  bool known = false;
  double value = 0.0;  // kInf allowed
  bool lower_bound = false;
  std::string method;
  std::string note;
  bool operator==(const BetaValue&) const = default;
};

BetaValue beta_T_classifier(const ReturnSpec& returns, double horizon = 1.0);

struct BetaReport {
  BetaValue beta_T;
  RootResult beta_inf;
  std::string beta_inf_method;
  bool operator==(const BetaReport&) const = default;
};

// beta_T plus beta_inf; a missing or out-of-domain root is recorded, not thrown.
BetaReport beta_report(const ReturnSpec& returns, double horizon = 1.0);

enum class Verdict { CertainRuin, ConditionNotMet, Inapplicable };
const char* to_string(Verdict v);

struct CertainRuinReport {
  Verdict verdict = Verdict::Inapplicable;
  double drift_limit = 0.0;  // D
  double p_used = 1.5;
  bool cond_i = false;   // int (1+s)^{-2} d<R^c>_s finite
  bool cond_ii = false;  // jump integrability with exponent p
  bool cond_iii = false; // D < 0
  double integral_i = 0.0;
  double integral_ii = 0.0;
  double time_average = 0.0;  // additive family: average drift over [0, s_horizon]
  std::string method;
  std::string note;
  bool operator==(const CertainRuinReport&) const = default;
};

CertainRuinReport certain_ruin_levy(const ReturnSpec& returns, const BusinessSpec& business, double p = 1.5);

struct AdditiveRuinOptions {
  double p = 1.5;
  double s_horizon = 1e4;
  // Use the constant tail extension of g analytically. When false, D is the
  // numerical time average on [0, s_horizon], checked for stabilization.
  bool analytic_tail = true;
};

CertainRuinReport certain_ruin_additive(const AdditiveReturns& returns, const BusinessSpec& business,
                                        const AdditiveRuinOptions& options = {});

}  // namespace ruinlab
