#pragma once

#include <functional>
#include <span>

namespace replisum {

struct QuadratureResult {
  double value;
  double error;  // estimated absolute error
};

/// Tanh-sinh integration of f over [lo, hi], split at the
/// given interior breakpoints. Throws NumericalError when the error estimate
/// exceeds abs_tol.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           double abs_tol = 1e-8, std::span<const double> breakpoints = {});

}  // namespace replisum
