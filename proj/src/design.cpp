#include "replisum/design.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <ostream>
#include <sstream>

#include "replisum/combine.hpp"
#include "replisum/conditional.hpp"
#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

void check(const DesignInput& in) {
  if (!(in.po > 0.0 && in.po < 1.0)) throw DomainError("po must lie strictly inside (0, 1)");
  if (!(in.target_power > 0.0 && in.target_power < 1.0))
    throw DomainError("target power must lie in (0, 1)");
  if (!(in.shrinkage >= 0.0 && in.shrinkage < 1.0))
    throw DomainError("shrinkage must lie in [0, 1)");
  if (in.po >= 0.5) throw DomainError("po must be below 0.5 (original z-value must be positive)");
}

double shrunk_zo(const DesignInput& in) { return (1.0 - in.shrinkage) * norm_isf(in.po); }

double design_numerator(const DesignInput& in) {
  const double level = adjusted_level(in.method, in.po, in.alpha, in.w);
  const double s = norm_isf(level) + norm_quantile(in.target_power);
  return s * s;
}

}  // namespace

std::string_view to_string(PowerType t) {
  return t == PowerType::Conditional ? "conditional" : "predictive";
}

double adjusted_level(Method method, double po, double alpha, const std::optional<Weights>& w) {
  double level = 0.0;
  switch (method) {
    case Method::TwoTrials: level = alpha; break;
    case Method::Edgington: level = level_edgington(po, alpha); break;
    case Method::EdgingtonWeighted:
      level = level_edgington_weighted(po, alpha, w.value_or(default_weights()));
      break;
    case Method::Fisher:
    case Method::MetaAnalysis:
      throw UsageError("sample size planning is available for two-trials, edgington and "
                       "edgington-weighted only");
  }
  if (!(level > 0.0)) {
    std::ostringstream msg;
    msg << "replication success is impossible for " << to_string(method) << " with po = " << po;
    throw DomainError(msg.str());
  }
  return level;
}

double relative_sample_size_conditional(const DesignInput& in) {
  check(in);
  const double zo = shrunk_zo(in);
  return design_numerator(in) / (zo * zo);
}

double predictive_power(double zo, double c, double level) {
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
  if (std::isinf(c)) return norm_cdf(zo);
  return norm_cdf((std::sqrt(c) * zo - norm_isf(level)) / std::sqrt(1.0 + c));
}

double relative_sample_size_predictive(const DesignInput& in) {
  check(in);
  const double zo = shrunk_zo(in);
  const double level = adjusted_level(in.method, in.po, in.alpha, in.w);
  const double ceiling = norm_cdf(zo);
  if (!(ceiling > in.target_power)) {
    std::ostringstream msg;
    msg << "target predictive power " << in.target_power
        << " is unattainable: the supremum over c is Phi(zo) = " << ceiling;
    throw UnattainableError(msg.str(), ceiling);
  }
  const auto gap = [&](double c) { return predictive_power(zo, c, level) - in.target_power; };
  double lo = 1e-6;
  double hi = 1e6;
  while (gap(lo) > 0.0 && lo > 1e-300) lo *= 1e-3;
  while (gap(hi) < 0.0) {
    hi *= 1e3;
    if (hi > 1e300) throw NumericalError("could not bracket the predictive sample size");
  }
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::abs(a); };
  const auto [a, b] = boost::math::tools::bisect(gap, lo, hi, tol);
  return 0.5 * (a + b);
}

double relative_sample_size(const DesignInput& in) {
  return in.power_type == PowerType::Conditional ? relative_sample_size_conditional(in)
                                                 : relative_sample_size_predictive(in);
}

long absolute_sample_size(const DesignInput& in) {
  check(in);
  double n = 0.0;
  if (in.power_type == PowerType::Conditional && in.theta_o && in.tau) {
    if (*in.theta_o == 0.0) throw DomainError("original effect estimate must be non-zero");
    if (!(*in.tau > 0.0)) throw DomainError("tau must be positive");
    const double theta = (1.0 - in.shrinkage) * *in.theta_o;
    n = 2.0 * *in.tau * *in.tau * design_numerator(in) / (theta * theta);
  } else if (in.no) {
    if (*in.no < 1) throw DomainError("original sample size must be positive");
    n = relative_sample_size(in) * *in.no;
  } else {
    throw UsageError("absolute sample size needs theta and tau (conditional) or the original size no");
  }
  // guard against 63.0000000001 from rounding noise
  return static_cast<long>(std::ceil(n * (1.0 - 1e-12)));
}

double sample_size_ratio_conditional(double po, double alpha, double target_power, Method method,
                                     const std::optional<Weights>& w) {
  const double beta_z = norm_quantile(target_power);
  const double num = norm_isf(adjusted_level(method, po, alpha, w)) + beta_z;
  const double den = norm_isf(alpha) + beta_z;
  return (num * num) / (den * den);
}

double sample_size_ratio_predictive(double po, double alpha, double target_power, Method method,
                                    const std::optional<Weights>& w) {
  DesignInput in;
  in.po = po;
  in.alpha = alpha;
  in.target_power = target_power;
  in.power_type = PowerType::Predictive;
  in.w = w;
  in.method = method;
  const double c_method = relative_sample_size_predictive(in);
  in.method = Method::TwoTrials;
  return c_method / relative_sample_size_predictive(in);
}

std::vector<RatioRow> sample_size_ratio_curve(PowerType type, Method method, double target_power,
                                              std::span<const double> pos, double alpha,
                                              const std::optional<Weights>& w) {
  std::vector<RatioRow> rows;
  rows.reserve(pos.size());
  for (double po : pos) {
    const double r = type == PowerType::Conditional
                         ? sample_size_ratio_conditional(po, alpha, target_power, method, w)
                         : sample_size_ratio_predictive(po, alpha, target_power, method, w);
    rows.push_back({type, method, target_power, po, r});
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, int steps) {
  if (!(lo > 0.0 && hi >= lo) || steps < 1) throw DomainError("invalid log grid");
  if (steps == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(steps));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < steps; ++i) grid[i] = std::exp(a + (b - a) * i / (steps - 1));
  grid.back() = hi;
  return grid;
}

void write_ratio_csv(std::ostream& out, std::span<const RatioRow> rows) {
  out << "power_type,method,target_power,po,ratio\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows)
    out << to_string(r.power_type) << ',' << to_string(r.method) << ',' << r.target_power << ','
        << r.po << ',' << r.ratio << '\n';
  out.precision(precision);
}

}  // namespace replisum
