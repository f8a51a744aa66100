#pragma once

namespace replisum {

/// Standard normal CDF. Throws DomainError for non-finite x.
double norm_cdf(double x);

/// Upper tail 1 - Phi(x), accurate far into the right tail.
double norm_sf(double x);

/// Standard normal density.
double norm_pdf(double x) noexcept;

/// Standard normal quantile for p in (0, 1). Throws DomainError otherwise.
double norm_quantile(double p);

/// Phi^{-1}(1 - p) computed without forming 1 - p.
double norm_isf(double p);

/// Upper tail of the chi-squared distribution with 4 df: exp(-x/2)(1 + x/2).
double chisq4_tail(double x);

/// Upper-tail quantile of chi^2_4: the x with chisq4_tail(x) = p.
double chisq4_isf(double p);

/// Fisher critical product c_F: po*pr <= c_F  <=>  Fisher combined p <= alpha^2.
double fisher_critical(double alpha);

/// CDF of the sum of n independent U(0,1) variables, 1 <= n <= 10.
double irwin_hall_cdf(double x, int n);

/// CDF of wo*U1 + wr*U2 (trapezoidal law), 0 < wo <= wr.
double trapezoid_cdf(double x, double wo, double wr);

}  // namespace replisum
