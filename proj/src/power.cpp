#include "replisum/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "replisum/combine.hpp"
#include "replisum/conditional.hpp"
#include "replisum/error.hpp"
#include "replisum/quadrature.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

constexpr double kHalfWidth = 8.5;
constexpr double kTolerance = 1e-8;

// Integrates Pr(zr >= critical(zo)) * phi(zo - mu) over zo >= lower.
double integrate_power(Method method, const PowerScenario& s, double lower,
                       std::span<const double> breakpoints = {}) {
  validate(s);
  const double mu = mu_from_original_power(s.original_power, s.alpha);
  const double shift = s.d * mu * std::sqrt(s.c);
  const double lo = std::max(lower, mu - kHalfWidth);
  const double hi = mu + kHalfWidth;
  if (lo >= hi) return 0.0;

  const auto integrand = [&](double zo) {
    const double crit = replication_critical_z(method, zo, s.alpha, s.w, s.c);
    double success;
    if (crit == std::numeric_limits<double>::infinity()) {
      success = 0.0;
    } else if (crit == -std::numeric_limits<double>::infinity()) {
      success = 1.0;
    } else {
      success = norm_cdf(shift - crit);
    }
    return success * norm_pdf(zo - mu);
  };
  return integrate(integrand, lo, hi, kTolerance, breakpoints).value;
}

double level_lower_limit(double level) {
  return level >= 1.0 ? -std::numeric_limits<double>::infinity() : norm_isf(level);
}

}  // namespace

void validate(const PowerScenario& s) {
  if (!(s.original_power > 0.0 && s.original_power < 1.0))
    throw DomainError("original power must lie in (0, 1)");
  if (!(s.alpha > 0.0 && s.alpha < 0.5)) throw DomainError("alpha must lie in (0, 0.5)");
  if (!std::isfinite(s.c) || !(s.c > 0.0)) throw DomainError("c must be finite and positive");
  if (!std::isfinite(s.d) || !(s.d > 0.0)) throw DomainError("d must be finite and positive");
  if (!(mu_from_original_power(s.original_power, s.alpha) > 0.0))
    throw DomainError("original power too low: mean original z-value must be positive");
}

double mu_from_original_power(double original_power, double alpha) {
  return norm_isf(alpha) + norm_quantile(original_power);
}

double project_power_two_trials(const PowerScenario& s) {
  validate(s);
  const double mu = mu_from_original_power(s.original_power, s.alpha);
  const double z = norm_isf(s.alpha);
  return norm_cdf(mu - z) * norm_cdf(s.d * mu * std::sqrt(s.c) - z);
}

double project_power_edgington(const PowerScenario& s) {
  return integrate_power(Method::Edgington, s, norm_isf(budget(s.alpha)));
}

double project_power_edgington_weighted(const PowerScenario& s) {
  const Weights w = s.w.value_or(default_weights());
  PowerScenario sw = s;
  sw.w = w;
  return integrate_power(Method::EdgingtonWeighted, sw,
                         level_lower_limit(budget_weighted(s.alpha, w) / w.wo()));
}

double project_power_fisher(const PowerScenario& s) {
  // Pr(success | zo) jumps to 1 where po falls below c_F.
  const double kink[] = {norm_isf(fisher_critical(s.alpha))};
  return integrate_power(Method::Fisher, s, 0.0, kink);
}

double project_power_meta(const PowerScenario& s) {
  validate(s);
  // Success rises from 0 to 1 around zo = centre over a width of order sqrt(c).
  const double mu = mu_from_original_power(s.original_power, s.alpha);
  const double root_c = std::sqrt(s.c);
  const double centre =
      norm_isf(s.alpha * s.alpha) * std::sqrt(1.0 + s.c) - root_c * s.d * mu * root_c;
  const double edges[] = {centre - 10.0 * root_c, centre, centre + 10.0 * root_c};
  return integrate_power(Method::MetaAnalysis, s, 0.0, edges);
}

double project_power(Method method, const PowerScenario& s) {
  switch (method) {
    case Method::TwoTrials: return project_power_two_trials(s);
    case Method::Edgington: return project_power_edgington(s);
    case Method::EdgingtonWeighted: return project_power_edgington_weighted(s);
    case Method::Fisher: return project_power_fisher(s);
    case Method::MetaAnalysis: return project_power_meta(s);
  }
  throw UsageError("unknown method");
}

double limit_power_edgington(double original_power, double alpha, const std::optional<Weights>& w) {
  const double b = w ? budget_weighted(alpha, *w) / w->wo() : budget(alpha);
  if (b >= 1.0) return 1.0;
  return norm_sf(norm_isf(b) - mu_from_original_power(original_power, alpha));
}

std::vector<PowerCurveRow> power_curve(std::span<const Method> methods,
                                       std::span<const double> cs, const PowerScenario& base) {
  std::vector<PowerCurveRow> rows;
  rows.reserve(methods.size() * cs.size());
  for (Method m : methods) {
    for (double c : cs) {
      PowerScenario s = base;
      s.c = c;
      rows.push_back({m, c, s.d, s.original_power, s.alpha, project_power(m, s)});
    }
  }
  return rows;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw DomainError("grid needs at least one step");
  if (steps == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) grid[i] = lo + (hi - lo) * i / (steps - 1);
  return grid;
}

void write_power_csv(std::ostream& out, std::span<const PowerCurveRow> rows) {
  out << "method,c,d,original_power,alpha,project_power\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows)
    out << to_string(r.method) << ',' << r.c << ',' << r.d << ',' << r.original_power << ','
        << r.alpha << ',' << r.project_power << '\n';
  out.precision(precision);
}

}  // namespace replisum
