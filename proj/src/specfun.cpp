#include "replisum/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "replisum/error.hpp"

namespace replisum {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Wichura (1988), algorithm AS 241 (PPND16), lower half only: p in (0, 0.5].
double quantile_as241(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(p));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return -val;
}

double lower_quantile(double p) {
  double x = quantile_as241(p);
  const double dens = norm_pdf(x);
  if (dens > 0.0) x -= (0.5 * std::erfc(-x * kInvSqrt2) - p) / dens;
  return x;
}

}  // namespace

double norm_cdf(double x) {
  if (!std::isfinite(x)) throw DomainError("norm_cdf: non-finite argument");
  return clamp_unit(0.5 * std::erfc(-x * kInvSqrt2));
}

double norm_sf(double x) {
  if (!std::isfinite(x)) throw DomainError("norm_sf: non-finite argument");
  return clamp_unit(0.5 * std::erfc(x * kInvSqrt2));
}

double norm_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("norm_quantile: p must lie strictly inside (0, 1), got " +
                      std::to_string(p));
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p >= 0.5
  return p < 0.5 ? lower_quantile(p) : -lower_quantile(1.0 - p);
}

double norm_isf(double p) { return -norm_quantile(p); }

double chisq4_tail(double x) {
  if (!(x >= 0.0)) throw DomainError("chisq4_tail: x must be >= 0");
  if (std::isinf(x)) return 0.0;
  return clamp_unit(std::exp(-0.5 * x) * (1.0 + 0.5 * x));
}

double chisq4_isf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chisq4_isf: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (chisq4_tail(hi) > p) hi *= 2.0;
  // Bisect until the bracket cannot shrink any further.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (chisq4_tail(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double fisher_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("fisher_critical: alpha must lie in (0, 1)");
  return std::exp(-0.5 * chisq4_isf(alpha * alpha));
}

double irwin_hall_cdf(double x, int n) {
  if (n < 1 || n > 10) throw DomainError("irwin_hall_cdf: n must be in [1, 10]");
  if (std::isnan(x)) throw DomainError("irwin_hall_cdf: NaN argument");
  if (x <= 0.0) return 0.0;
  if (x >= n) return 1.0;
  // Upper half by symmetry: fewer alternating terms, less cancellation.
  if (x > 0.5 * n) return clamp_unit(1.0 - irwin_hall_cdf(n - x, n));

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;

  // Kahan-compensated alternating sum over j = 0..floor(x).
  double sum = 0.0;
  double comp = 0.0;
  double binom = 1.0;
  const int jmax = static_cast<int>(std::floor(x));
  for (int j = 0; j <= jmax; ++j) {
    const double term = (j % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(x - j, n);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    binom = binom * (n - j) / (j + 1);
  }
  return clamp_unit(sum / factorial);
}

double trapezoid_cdf(double x, double wo, double wr) {
  if (!(wo > 0.0 && wr > 0.0) || !std::isfinite(wo) || !std::isfinite(wr) || wo > wr)
    throw DomainError("trapezoid_cdf: weights must satisfy 0 < wo <= wr");
  if (std::isnan(x)) throw DomainError("trapezoid_cdf: NaN argument");
  const double total = wo + wr;
  if (x <= 0.0) return 0.0;
  if (x >= total) return 1.0;
  double f;
  if (x <= wo) {
    f = x * x / (2.0 * wo * wr);
  } else if (x <= wr) {
    f = (x - 0.5 * wo) / wr;
  } else {
    const double rest = total - x;  // mirror of the first branch
    f = 1.0 - rest * rest / (2.0 * wo * wr);
  }
  return clamp_unit(f);
}

}  // namespace replisum
