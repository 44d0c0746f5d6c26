#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "ruinlab/config.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/model.hpp"

using namespace ruinlab;

namespace {

ExperimentSpec base_spec() {
  ExperimentSpec s;
  s.business = BusinessSpec{-0.1, 0.2, NoJumps{}};
  s.returns = BlackScholesReturns{0.3, 0.4};
  s.grid = GridSpec{1.0, 100, true};
  s.capitals = {1.0, 2.0};
  s.n_paths = 10;
  s.alphas = {1.5};
  return s;
}

bool has_failure(const ValidationReport& r, const std::string& key, const std::string& needle) {
  for (const Diagnostic& d : r.failures) {
    if (d.key == key && d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("a plain black-scholes experiment validates") {
  CHECK(validate(base_spec()).ok());
}

TEST_CASE("return jumps at or below -1 are rejected") {
  ExperimentSpec s = base_spec();
  s.returns = LevyReturns{0.1, 0.2, CompoundPoissonJumps{1.0, PointMassJumps{-1.5}}};
  const ValidationReport r = validate(s);
  REQUIRE_FALSE(r.ok());
  CHECK(r.summary().find("jump support must lie in (−1, ∞)") != std::string::npos);
  // Gaussian sizes have unbounded support
  s.returns = LevyReturns{0.1, 0.2, CompoundPoissonJumps{1.0, GaussianJumps{0.0, 0.1}}};
  CHECK_FALSE(validate(s).ok());
  s.returns = LevyReturns{0.1, 0.2, CompoundPoissonJumps{1.0, DoubleExponentialJumps{1.0, 2.0, 3.0}}};
  CHECK(validate(s).ok());
}

TEST_CASE("infinite-activity business jumps are rejected") {
  ExperimentSpec s = base_spec();
  s.business.jumps = TemperedStableJumps{1, 1, 1, 1, 1.5, 0.5};
  const ValidationReport r = validate(s);
  REQUIRE_FALSE(r.ok());
  CHECK(r.summary().find("infinite-activity business jumps unsupported") != std::string::npos);
}

TEST_CASE("diagnostics name the key path") {
  ExperimentSpec s = base_spec();
  s.n_paths = 0;
  s.grid.n_steps = 0;
  s.capitals = {2.0, 1.0};
  s.alphas = {-1.0};
  const ValidationReport r = validate(s);
  CHECK(has_failure(r, "mc.n_paths", "n_paths ≥ 1"));
  CHECK(has_failure(r, "grid.n_steps", "n_steps ≥ 1"));
  CHECK(has_failure(r, "capitals", "ascending"));
  CHECK(has_failure(r, "alphas", "> 0"));
  try {
    require_valid(r);
    FAIL("expected InvalidSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSpec);
  }
}

TEST_CASE("black-scholes needs positive volatility and jump parameters must be positive") {
  ExperimentSpec s = base_spec();
  s.returns = BlackScholesReturns{0.3, 0.0};
  CHECK_FALSE(validate(s).ok());
  s = base_spec();
  s.business.jumps = CompoundPoissonJumps{-1.0, ExponentialJumps{1.0}};
  CHECK_FALSE(validate(s).ok());
  s.business.jumps = CompoundPoissonJumps{1.0, DoubleExponentialJumps{1.5, 1.0, 1.0}};
  CHECK_FALSE(validate(s).ok());
  s.business.jumps = TemperedStableJumps{1, 1, 1, 1, 2.5, 0.5};
  CHECK_FALSE(validate(s).ok());
}

TEST_CASE("additive weight tables") {
  ExperimentSpec s = base_spec();
  AdditiveReturns a;
  a.weight = PiecewiseLinear{{0.0, 1.0}, {1.0, 2.0}};
  a.drift = 0.1;
  a.sigma = 0.2;
  s.returns = a;
  CHECK(validate(s).ok());
  a.weight = PiecewiseLinear{{0.0, 0.5}, {1.0, 2.0}};  // does not cover T = 1
  s.returns = a;
  CHECK_FALSE(validate(s).ok());
  a.weight = PiecewiseLinear{{0.0, 1.0}, {1.0, -0.5}};  // crosses zero
  s.returns = a;
  CHECK_FALSE(validate(s).ok());
  a.weight = PiecewiseLinear{{0.0}, {1.0}};
  s.returns = a;
  CHECK_FALSE(validate(s).ok());
}

TEST_CASE("piecewise-linear weight integrals") {
  const PiecewiseLinear g{{0.0, 1.0, 3.0}, {1.0, 3.0, 3.0}};
  CHECK(g(0.5) == doctest::Approx(2.0));
  CHECK(g(10.0) == doctest::Approx(3.0));
  CHECK(g.integral(0.0, 1.0) == doctest::Approx(2.0));
  CHECK(g.integral(0.0, 3.0) == doctest::Approx(8.0));
  // int_0^1 (1 + 2s)^2 ds = 13/3
  CHECK(g.integral_sq(0.0, 1.0) == doctest::Approx(13.0 / 3.0));
  CHECK(g.integral_sq(0.5, 2.0) == doctest::Approx((std::pow(3.0, 3) - std::pow(2.0, 3)) / 6.0 + 9.0));
  CHECK(g.max_value() == 3.0);
  CHECK(g.min_value() == 1.0);
}

TEST_CASE("delta_x examples") {
  CHECK(delta_x(BusinessSpec{-1.0, 0.0, NoJumps{}}) == -1.0);
  // 2 int_1^inf x e^{-x} dx = 4/e
  CHECK(delta_x(BusinessSpec{0.0, 0.0, CompoundPoissonJumps{2.0, ExponentialJumps{1.0}}}) ==
        doctest::Approx(4.0 / std::exp(1.0)).epsilon(1e-10));
  CHECK(delta_x(BusinessSpec{0.5, 0.0, CompoundPoissonJumps{1.0, PointMassJumps{0.5}}}) == 0.5);
  CHECK(delta_x(BusinessSpec{0.0, 0.0, CompoundPoissonJumps{3.0, PointMassJumps{-2.0}}}) == doctest::Approx(-6.0));
}

TEST_CASE("delta_x is a_X plus a constant") {
  const JumpFamily nu = CompoundPoissonJumps{1.5, DoubleExponentialJumps{0.3, 0.8, 1.2}};
  const double base = delta_x(BusinessSpec{0.0, 0.1, nu});
  for (double a : {-2.0, -0.5, 0.7, 3.0}) CHECK(delta_x(BusinessSpec{a, 0.1, nu}) == doctest::Approx(base + a));
  // tempered-stable tails against the one-sided integrals done by hand:
  // int_1^inf x^{-0.5} e^{-2x} dx = sqrt(pi/2) erfc(sqrt 2)
  const TemperedStableJumps ts{1.0, 1.0, 3.0, 2.0, 0.5, 0.5};
  const double pos = std::sqrt(std::numbers::pi / 2.0) * std::erfc(std::sqrt(2.0));
  const double neg = std::sqrt(std::numbers::pi / 3.0) * std::erfc(std::sqrt(3.0));
  CHECK(delta_x(BusinessSpec{0.0, 0.0, ts}) == doctest::Approx(pos - neg).epsilon(1e-9));
}

TEST_CASE("config documents round-trip every return family") {
  ExperimentSpec s = base_spec();
  std::vector<ReturnSpec> families = {
      BlackScholesReturns{0.3, 0.4},
      LevyReturns{0.1, 0.2, CompoundPoissonJumps{2.0, DoubleExponentialJumps{0.4, 3.0, 5.0}}},
      HatReturns{0.05, 0.1, TemperedStableJumps{1, 1, 3, 1, 0.5, 0.5}, 1e-3},
      HatReturns{0.05, 0.1, CompoundPoissonJumps{1.0, GaussianJumps{0.2, 0.1}}, 1e-3},
      AdditiveReturns{PiecewiseLinear{{0.0, 0.5, 2.0}, {1.0, 0.7, 1.3}}, 0.2, 0.3,
                      CompoundPoissonJumps{1.0, PointMassJumps{0.1}}},
  };
  for (const ReturnSpec& r : families) {
    s.returns = r;
    s.business.jumps = CompoundPoissonJumps{0.5, ExponentialJumps{2.0}};
    const Json doc = to_json(s);
    CHECK(spec_from_json(doc) == s);
    CHECK(spec_from_json(Json::parse(doc.dump())) == s);
  }
}

TEST_CASE("config parsing is strict about keys and types") {
  const Json good = to_json(base_spec());
  auto reject = [&](Json doc, const std::string& needle) {
    try {
      spec_from_json(doc);
      FAIL("accepted " << doc.dump());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidSpec);
      CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
    }
  };
  Json d = good;
  d["returns"]["volatility"] = 0.3;
  reject(d, "returns.volatility: unknown key");
  d = good;
  d.erase("grid");
  reject(d, "grid: missing");
  d = good;
  d["mc"]["n_paths"] = "many";
  reject(d, "mc.n_paths: expected an integer");
  d = good;
  d["returns"]["type"] = "heston";
  reject(d, "returns.type");
  d = good;
  d["business"]["jumps"] = {{"type", "compound_poisson"}, {"rate", 1.0}, {"size", {{"type", "exponential"}}}};
  reject(d, "business.jumps.size.rate: missing");
  d = good;
  d["extra"] = 1;
  reject(d, "extra: unknown key");
}

TEST_CASE("dotted overrides") {
  Json doc = to_json(base_spec());
  apply_override(doc, "mc.n_paths=0");
  CHECK(doc["mc"]["n_paths"] == 0);
  apply_override(doc, "returns.type=levy");
  CHECK(doc["returns"]["type"] == "levy");
  apply_override(doc, "capitals=[1,2,3]");
  CHECK(doc["capitals"].size() == 3);
  apply_override(doc, "novikov.K1=4");
  CHECK(doc["novikov"]["K1"] == 4);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), Error);
  CHECK_THROWS_AS(apply_override(doc, "capitals.x=1"), Error);
}

TEST_CASE("config sections beyond the experiment") {
  Json doc = to_json(base_spec());
  doc["novikov"] = {{"K1", 1.0}, {"K2", 2.0}, {"K3", 3.0}};
  doc["certain"] = {{"y", 1.0}, {"horizons", {1, 10, 100}}, {"p", 1.2}};
  doc["bound"] = {{"horizon", "infinite"}, {"moments", "monte_carlo"}};
  doc["slope"] = {{"beta_ref", 3.0}, {"floor", 20}};
  const Config c = config_from_json(doc);
  CHECK(c.novikov.user);
  CHECK(c.novikov.k2 == 2.0);
  CHECK(c.certain.horizons.size() == 3);
  CHECK(c.certain.p == 1.2);
  CHECK(c.bound.infinite_horizon);
  CHECK(c.bound.moments == MomentMode::MonteCarlo);
  CHECK(*c.slope.beta_ref == 3.0);
  CHECK(c.slope.floor == 20);
  CHECK(config_from_json(to_json(c)) == c);
  doc["bound"]["horizon"] = "forever";
  CHECK_THROWS_AS(config_from_json(doc), Error);
}
