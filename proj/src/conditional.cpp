#include "replisum/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "replisum/combine.hpp"
#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

constexpr double kLevelFloor = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(double po, double alpha) {
  if (!(po > 0.0 && po < 1.0)) throw DomainError("po must lie strictly inside (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

double level_to_z(double level) {
  if (level <= 0.0) return kInf;
  if (level >= 1.0) return -kInf;
  return norm_isf(std::clamp(level, kLevelFloor, 1.0 - kLevelFloor));
}

}  // namespace

double level_two_trials(double po, double alpha) {
  check_inputs(po, alpha);
  return po <= alpha ? alpha : 0.0;
}

double level_edgington(double po, double alpha) {
  check_inputs(po, alpha);
  return std::clamp(budget(alpha) - po, 0.0, 1.0);
}

double level_edgington_weighted(double po, double alpha, const Weights& w) {
  check_inputs(po, alpha);
  return std::clamp((budget_weighted(alpha, w) - w.wo() * po) / w.wr(), 0.0, 1.0);
}

double level_fisher(double po, double alpha) {
  check_inputs(po, alpha);
  return std::min(fisher_critical(alpha) / po, 1.0);
}

double level_meta(double po, double alpha, double c) {
  check_inputs(po, alpha);
  if (!std::isfinite(c) || !(c > 0.0)) throw DomainError("variance ratio c must be positive");
  const double threshold = (norm_isf(alpha * alpha) * std::sqrt(c + 1.0) - norm_isf(po)) / std::sqrt(c);
  return norm_sf(threshold);
}

ConditionalLevel conditional_level(Method method, double po, double alpha,
                                   const std::optional<Weights>& w, std::optional<double> c) {
  double level = 0.0;
  switch (method) {
    case Method::TwoTrials: level = level_two_trials(po, alpha); break;
    case Method::Edgington: level = level_edgington(po, alpha); break;
    case Method::EdgingtonWeighted:
      level = level_edgington_weighted(po, alpha, w.value_or(default_weights()));
      break;
    case Method::Fisher: level = level_fisher(po, alpha); break;
    case Method::MetaAnalysis:
      if (!c) throw UsageError("meta-analysis level requires the variance ratio c");
      level = level_meta(po, alpha, *c);
      break;
  }
  return ConditionalLevel{method, po, level};
}

double replication_critical_z(Method method, double zo, double alpha,
                              const std::optional<Weights>& w, std::optional<double> c) {
  if (method == Method::MetaAnalysis) {
    if (!c) throw UsageError("meta-analysis requires the variance ratio c");
    return (norm_isf(alpha * alpha) * std::sqrt(*c + 1.0) - zo) / std::sqrt(*c);
  }
  const double po = norm_sf(zo);
  if (po <= 0.0) {
    // zo beyond double range of the tail: the po -> 0 limits
    switch (method) {
      case Method::TwoTrials: return norm_isf(alpha);
      case Method::Edgington: return level_to_z(budget(alpha));
      case Method::EdgingtonWeighted: {
        const Weights ww = w.value_or(default_weights());
        return level_to_z(budget_weighted(alpha, ww) / ww.wr());
      }
      default: return -kInf;
    }
  }
  if (po >= 1.0) return kInf;
  return level_to_z(conditional_level(method, po, alpha, w, c).level);
}

}  // namespace replisum
