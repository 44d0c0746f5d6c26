#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "ruinlab/bounds.hpp"
#include "ruinlab/errors.hpp"

using namespace ruinlab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no Error thrown");
  return ErrorCode::InvalidSpec;
}

ExperimentSpec bs_spec(std::int64_t paths = 10000, std::int64_t steps = 200) {
  ExperimentSpec s;
  s.business = BusinessSpec{-0.1, 0.2, NoJumps{}};
  s.returns = BlackScholesReturns{0.3, 0.4};
  s.grid = GridSpec{1.0, steps, true};
  s.capitals = {5, 10, 20};
  s.n_paths = paths;
  return s;
}

double e_abs_w(double a) { return std::pow(2.0, a / 2.0) * std::tgamma((a + 1.0) / 2.0) / std::sqrt(std::numbers::pi); }

}  // namespace

TEST_CASE("constants for a pure drift at alpha one") {
  const BoundConstants c = bound_constants(BusinessSpec{-1.0, 0.0, NoJumps{}}, 1.0);
  CHECK(c.regime == Regime::Small);
  CHECK(c.c1 == doctest::Approx(4.0));
  CHECK(c.c2 == 0.0);
  CHECK(c.c3 == 0.0);
}

TEST_CASE("brownian constant at alpha two is 32") {
  const BoundConstants c = bound_constants(BusinessSpec{0.0, 1.0, NoJumps{}}, 2.0);
  CHECK(c.regime == Regime::Middle);
  CHECK(c.c2 == doctest::Approx(32.0).epsilon(1e-14));
  CHECK(c.c1 == 0.0);
  CHECK(c.c3 == 0.0);
  // the Brownian constant is 2 * 4^a * E|W_1|^a * sigma^a
  for (double a : {0.5, 1.5, 3.0}) {
    const BoundConstants k = bound_constants(BusinessSpec{0.0, 0.7, NoJumps{}}, a);
    CHECK(k.c2 == doctest::Approx(2.0 * std::pow(4.0, a) * e_abs_w(a) * std::pow(0.7, a)).epsilon(1e-13));
  }
}

TEST_CASE("degenerate business process has zero constants and zero bound") {
  const BoundConstants c = bound_constants(BusinessSpec{0.0, 0.0, NoJumps{}}, 0.5);
  CHECK(c.c1 == 0.0);
  CHECK(c.c2 == 0.0);
  CHECK(c.c3 == 0.0);
  ExperimentSpec s = bs_spec(100, 20);
  s.business = BusinessSpec{0.0, 0.0, NoJumps{}};
  const MomentSet m = moments(s, 0.5, MomentMode::ClosedForm);
  const BoundReport r = make_bound_report(s.business, m, beta_T_classifier(s.returns));
  for (double y : {0.1, 1.0, 100.0}) CHECK(finite_time_bound(r, y) == 0.0);
}

TEST_CASE("jump constants in each regime") {
  // point mass jumps of size 3 at rate 2 and of size 0.5 at rate 2 (separately)
  const BusinessSpec big{0.0, 0.0, CompoundPoissonJumps{2.0, PointMassJumps{3.0}}};
  const BusinessSpec small{0.0, 0.0, CompoundPoissonJumps{2.0, PointMassJumps{0.5}}};
  for (double a : {0.5, 1.5, 2.5}) {
    const BoundConstants cb = bound_constants(big, a);
    const BoundConstants cs = bound_constants(small, a);
    const double four = std::pow(4.0, a);
    CHECK(cb.tail_integral == doctest::Approx(2.0 * std::pow(3.0, a)));
    CHECK(cs.tail_integral == 0.0);
    if (a <= 1.0) {
      CHECK(cb.c3 == doctest::Approx(four * 2.0 * std::pow(3.0, a)));
      CHECK(cs.c2 == doctest::Approx(8.0 * four * std::pow(2.0 * 0.25, a / 2.0)));
    } else if (a <= 2.0) {
      CHECK(cb.c1 == doctest::Approx(four * std::pow(2.0 * std::pow(3.0, a), a)));
      CHECK(cb.c3 == 0.0);
      CHECK(cb.prefactor_restored);
    } else {
      CHECK(cs.c3 == doctest::Approx(8.0 * four * 2.0 * std::pow(0.5, a)));
      CHECK(cs.c2 == doctest::Approx(8.0 * four * std::pow(0.5, a / 2.0)));
    }
  }
}

TEST_CASE("constants are continuous inside each regime") {
  const BusinessSpec x{-0.3, 0.4, CompoundPoissonJumps{1.0, DoubleExponentialJumps{0.4, 1.5, 2.0}}};
  for (auto [lo, hi] : {std::pair{0.05, 1.0}, std::pair{1.02, 2.0}, std::pair{2.02, 4.0}}) {
    BoundConstants prev = bound_constants(x, lo);
    const int n = static_cast<int>(std::lround((hi - lo) / 0.01));
    for (int i = 1; i <= n; ++i) {
      const BoundConstants c = bound_constants(x, i == n ? hi : lo + 0.01 * i);
      CHECK(c.regime == prev.regime);
      CHECK(std::abs(c.c1 - prev.c1) < 0.15 * (1.0 + c.c1));
      CHECK(std::abs(c.c2 - prev.c2) < 0.15 * (1.0 + c.c2));
      CHECK(std::abs(c.c3 - prev.c3) < 0.15 * (1.0 + c.c3));
      prev = c;
    }
  }
}

TEST_CASE("novikov constants must be nonnegative") {
  CHECK(validate(NovikovConstants{8, 8, 8, false}).ok());
  CHECK_FALSE(validate(NovikovConstants{-1, 8, 8, true}).ok());
  CHECK(code_of([] { bound_constants(BusinessSpec{}, 1.0, NovikovConstants{1, -2, 1, true}); }) == ErrorCode::InvalidSpec);
  CHECK(code_of([] { bound_constants(BusinessSpec{}, 0.0); }) == ErrorCode::AlphaOutOfRange);
}

TEST_CASE("closed-form E J_T(alpha)") {
  const LaplaceExponent bs = laplace_exponent(BlackScholesReturns{0.3, 0.4});
  CHECK(expected_j_alpha(bs, 1.0, kInf) == doctest::Approx(1.0 / 0.14).epsilon(1e-14));
  CHECK(expected_j_alpha(bs, 1.0, 2.0) == doctest::Approx((1.0 - std::exp(-0.28)) / 0.14).epsilon(1e-14));
  const LaplaceExponent zero = laplace_exponent(LevyReturns{0.0, 0.0, NoJumps{}});
  for (double a : {0.5, 1.0, 3.0}) CHECK(expected_j_alpha(zero, a, 2.5) == 2.5);
  CHECK(code_of([&] { expected_j_alpha(bs, 3.0, kInf); }) == ErrorCode::InfiniteHorizonDivergent);
}

TEST_CASE("monte carlo E J_T(alpha) agrees with the closed form") {
  const std::vector<ReturnSpec> models = {
      BlackScholesReturns{0.3, 0.4},
      HatReturns{0.4, 0.2, CompoundPoissonJumps{1.0, GaussianJumps{0.2, 0.1}}, 1e-3},
      LevyReturns{0.2, 0.3, CompoundPoissonJumps{2.0, PointMassJumps{-0.3}}},
      LevyReturns{0.1, 0.2, CompoundPoissonJumps{1.0, ExponentialJumps{3.0}}},
  };
  for (const ReturnSpec& r : models) {
    ExperimentSpec s = bs_spec(10000, 200);
    s.returns = r;
    for (double a : {0.5, 1.0, 2.0}) {
      const MomentSet mc = moments(s, a, MomentMode::MonteCarlo);
      const MomentSet cf = moments(s, a, MomentMode::ClosedForm);
      CHECK(mc.e_j_alpha.source == MomentSource::MonteCarlo);
      CHECK(cf.e_j_alpha.source == MomentSource::ClosedForm);
      CHECK(std::abs(mc.e_j_alpha.value - cf.e_j_alpha.value) < 3.0 * mc.e_j_alpha.std_err);
      // both modes simulate the same paths for the other two moments
      CHECK(mc.e_i_alpha == cf.e_i_alpha);
    }
  }
}

TEST_CASE("moment consistency from the pathwise inequalities") {
  ExperimentSpec s = bs_spec(5000, 200);
  s.grid.horizon = 2.0;
  const double T = 2.0;
  for (double a : {0.5, 1.5, 3.0}) {
    const MomentSet m = moments(s, a, MomentMode::MonteCarlo);
    CHECK(m.e_i_alpha.value <= std::pow(T, a / 2.0) * m.e_j_half.value +
                                   3.0 * std::hypot(m.e_i_alpha.std_err, m.e_j_half.std_err));
    if (a >= 2.0) {
      CHECK(m.e_j_half.value <= std::pow(T, (a - 2.0) / 2.0) * m.e_j_alpha.value +
                                    3.0 * std::hypot(m.e_j_half.std_err, m.e_j_alpha.std_err));
    }
  }
}

TEST_CASE("bound scales exactly like y^-alpha") {
  ExperimentSpec s = bs_spec(2000, 100);
  const MomentSet m = moments(s, 1.5, MomentMode::ClosedForm);
  const BoundReport r = make_bound_report(s.business, m, beta_T_classifier(s.returns));
  const double b1 = finite_time_bound(r, 3.0);
  CHECK(finite_time_bound(r, 6.0) == doctest::Approx(b1 * std::pow(2.0, -1.5)).epsilon(1e-14));
  for (double y : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    CHECK(std::abs(finite_time_bound(r, y) * std::pow(y, 1.5) / (b1 * std::pow(3.0, 1.5)) - 1.0) < 1e-12);
  }
  CHECK_FALSE(r.novikov.user);
  REQUIRE(r.warnings.size() >= 2);
  CHECK(r.warnings[1].find("restored") != std::string::npos);
}

TEST_CASE("bound errors") {
  ExperimentSpec s = bs_spec(500, 50);
  s.returns = HatReturns{0.1, 0.1, CompoundPoissonJumps{1.0, DoubleExponentialJumps{0.0, 1.0, 4.0}}, 1e-3};
  const BetaValue beta = beta_T_classifier(s.returns);
  REQUIRE(beta.value == 4.0);
  {
    const MomentSet m = moments(s, 4.5, MomentMode::ClosedForm);
    CHECK(m.e_j_alpha.source == MomentSource::Unavailable);
    const BoundReport r = make_bound_report(s.business, m, beta);
    CHECK_FALSE(r.alpha_below_beta);
    CHECK(code_of([&] { finite_time_bound(r, 1.0); }) == ErrorCode::AlphaOutOfRange);
  }
  {
    // alpha below beta but the closed-form moment is missing for alpha <= 1 (C3 > 0 needs it)
    s.business.jumps = CompoundPoissonJumps{1.0, PointMassJumps{2.0}};
    MomentSet m = moments(s, 0.8, MomentMode::ClosedForm);
    m.e_j_alpha.source = MomentSource::Unavailable;
    const BoundReport r = make_bound_report(s.business, m, beta);
    CHECK(code_of([&] { finite_time_bound(r, 1.0); }) == ErrorCode::MomentUnavailable);
    CHECK(code_of([&] { infinite_time_bound(r, 1.0); }) == ErrorCode::Inapplicable);
  }
  {
    const BetaValue unknown;
    const MomentSet m = moments(bs_spec(100, 10), 1.0, MomentMode::ClosedForm);
    const BoundReport r = make_bound_report(BusinessSpec{-1, 0, NoJumps{}}, m, unknown);
    CHECK(code_of([&] { finite_time_bound(r, 1.0); }) == ErrorCode::AlphaOutOfRange);
  }
}

TEST_CASE("infinite-horizon moments") {
  const ReturnSpec r = BlackScholesReturns{0.3, 0.4};
  const MomentSet m = infinite_horizon_moments(r, 1.5);
  CHECK(std::isinf(m.horizon));
  const double psi15 = -(0.3 - 0.08) * 1.5 + 0.08 * 2.25;
  CHECK(m.e_j_alpha.value == doctest::Approx(-1.0 / psi15).epsilon(1e-14));
  // E I_inf^2 <= 2 / (psi(1) psi(2)); Lyapunov gives the 1.5 power
  const double psi1 = -0.14, psi2 = -(0.22) * 2 + 0.08 * 4;
  CHECK(m.e_i_alpha.source == MomentSource::UpperBound);
  CHECK(m.e_i_alpha.value == doctest::Approx(std::pow(2.0 / (psi1 * psi2), 0.75)).epsilon(1e-13));
  // E J_inf^{0.75}: integer order 1, E J_inf(2) = -1/psi(2)
  CHECK(m.e_j_half.value == doctest::Approx(std::pow(-1.0 / psi2, 0.75)).epsilon(1e-13));

  const BetaReport br = beta_report(r);
  BetaValue beta{true, br.beta_inf.root, false, "root", ""};
  const BoundReport rep = make_bound_report(BusinessSpec{-0.1, 0.2, NoJumps{}}, m, beta);
  CHECK(infinite_time_bound(rep, 10.0) > 0.0);
  CHECK(code_of([&] { finite_time_bound(rep, 10.0); }) == ErrorCode::Inapplicable);
  // psi(3) > 0 for this model
  CHECK(code_of([&] { infinite_horizon_moments(r, 3.0); }) == ErrorCode::InfiniteHorizonDivergent);
  // order 2 needs psi(2 * 2) < 0 for J^{alpha/2} with alpha = 2.5: psi(4) > 0 -> unavailable
  const MomentSet hi = infinite_horizon_moments(r, 2.5);
  CHECK(hi.e_i_alpha.source == MomentSource::Unavailable);
}
