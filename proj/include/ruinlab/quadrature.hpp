#pragma once

#include <functional>

namespace ruinlab {

// Adaptive quadrature of f over [a, b]; either bound may be infinite.
// Double-exponential rules are used so that integrable endpoint
// singularities (x^{-1-alpha} * x^2 near 0) converge. Throws
// Error{QuadratureFailure} when the result is not finite or the error
// estimate exceeds max(abs_tol, rel_tol * L1 norm).
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-11,
                 double abs_tol = 1e-13);

}  // namespace ruinlab
