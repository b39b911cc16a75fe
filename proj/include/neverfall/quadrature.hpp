#ifndef NEVERFALL_QUADRATURE_HPP
#define NEVERFALL_QUADRATURE_HPP

#include <functional>

namespace neverfall {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// Recursion depth is capped; the cap is generous for the smooth integrands
/// used here.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 48);

}  // namespace neverfall

#endif
