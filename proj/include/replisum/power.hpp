#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "replisum/types.hpp"

namespace replisum {

/// Design scenario for project power. The original study has power
/// `original_power` at one-sided level alpha; the replication has relative
/// sample size c = n_r / n_o and true effect d * theta_o.
struct PowerScenario {
  double original_power = 0.8;
  double c = 1.0;
  double d = 1.0;
  double alpha = 0.025;
  std::optional<Weights> w;  // EdgingtonWeighted only; defaults to (1, 2)
};

/// Throws DomainError on out-of-range fields.
void validate(const PowerScenario& s);

/// Mean of the original z-value: Phi^{-1}(1 - alpha) + Phi^{-1}(original_power).
double mu_from_original_power(double original_power, double alpha);

/// Closed form: Phi(mu - z_{1-alpha}) * Phi(d mu sqrt(c) - z_{1-alpha}).
double project_power_two_trials(const PowerScenario& s);

// The remaining methods integrate Pr(success | zo) against the N(mu, 1)
// density of zo over [max(lower, mu - 8.5), mu + 8.5] to absolute tolerance
// 1e-8. Fisher and meta-analysis start at zo = 0.
double project_power_edgington(const PowerScenario& s);
double project_power_edgington_weighted(const PowerScenario& s);
double project_power_fisher(const PowerScenario& s);
double project_power_meta(const PowerScenario& s);

double project_power(Method method, const PowerScenario& s);

/// c -> infinity limit for (weighted) Edgington:
/// 1 - Phi(Phi^{-1}(1 - b) - mu), with b = sqrt(2) alpha or b_w / wo.
double limit_power_edgington(double original_power, double alpha,
                             const std::optional<Weights>& w = std::nullopt);

struct PowerCurveRow {
  Method method;
  double c;
  double d;
  double original_power;
  double alpha;
  double project_power;
};

/// Evaluates every (method, c) combination for the fixed remaining fields of `base`.
std::vector<PowerCurveRow> power_curve(std::span<const Method> methods,
                                       std::span<const double> cs, const PowerScenario& base);

/// `steps` points from cmin to cmax inclusive (equal spacing).
std::vector<double> linear_grid(double lo, double hi, int steps);

/// Header: method,c,d,original_power,alpha,project_power
void write_power_csv(std::ostream& out, std::span<const PowerCurveRow> rows);

}  // namespace replisum
