#include "ruinlab/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

[[noreturn]] void fail(double a, double b, const std::string& why) {
  std::ostringstream msg;
  msg << "integral over [" << a << ", " << b << "]: " << why;
  throw Error(ErrorCode::QuadratureFailure, msg.str());
}

// Runs body with a per-thread cached rule, or a fresh one when nested.
template <class Rule, class Body>
double with_rule(bool nested, Body body) {
  if (nested) {
    Rule fresh;
    return body(fresh);
  }
  static thread_local Rule cached;
  return body(cached);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, rel_tol, abs_tol);
  // intervals a few ulps wide (closed-interval conventions) carry no mass
  if (std::isfinite(a) && std::isfinite(b) &&
      b - a <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
    return 0.0;
  }

  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  // The cached rules are reused at the outermost level only; nested calls
  // (an integrand that integrates) get fresh rule objects.
  thread_local int depth = 0;
  struct DepthGuard {
    int& d;
    explicit DepthGuard(int& x) : d(++x) {}
    ~DepthGuard() { --d; }
  } guard(depth);
  const bool nested = depth > 1;
  // Boost's integrators report non-convergence through the error estimate;
  // domain errors (e.g. non-finite integrands) surface as exceptions.
  try {
    const bool lower_inf = std::isinf(a);
    const bool upper_inf = std::isinf(b);
    if (lower_inf && upper_inf) {
      value = with_rule<boost::math::quadrature::sinh_sinh<double>>(
          nested, [&](auto& rule) { return rule.integrate(f, rel_tol, &error, &l1); });
    } else if (lower_inf || upper_inf) {
      value = with_rule<boost::math::quadrature::exp_sinh<double>>(
          nested, [&](auto& rule) { return rule.integrate(f, a, b, rel_tol, &error, &l1); });
    } else {
      value = with_rule<boost::math::quadrature::tanh_sinh<double>>(
          nested, [&](auto& rule) { return rule.integrate(f, a, b, rel_tol, &error, &l1); });
    }
  } catch (const std::exception& e) {
    fail(a, b, e.what());
  }
  if (!std::isfinite(value)) fail(a, b, "non-finite result");
  if (error > std::max(abs_tol, 1e3 * rel_tol * l1)) {
    std::ostringstream why;
    why << "error estimate " << error << " too large (L1 " << l1 << ")";
    fail(a, b, why.str());
  }
  return value;
}

}  // namespace ruinlab
