#pragma once

#include <optional>

#include "replisum/types.hpp"

namespace replisum {

// Replication significance level implied by each method once po is known:
// success  <=>  pr <= level(po). Under theta_r = 0 this is also the
// conditional Type-I error rate. A level of 0 means success is impossible,
// a level of 1 means success is guaranteed.

double level_two_trials(double po, double alpha);
double level_edgington(double po, double alpha);
double level_edgington_weighted(double po, double alpha, const Weights& w);
double level_fisher(double po, double alpha);
double level_meta(double po, double alpha, double c);

struct ConditionalLevel {
  Method method;
  double po;
  double level;
};

/// Dispatch; MetaAnalysis needs `c` (UsageError otherwise), EdgingtonWeighted
/// defaults to weights (1, 2).
ConditionalLevel conditional_level(Method method, double po, double alpha,
                                   const std::optional<Weights>& w = std::nullopt,
                                   std::optional<double> c = std::nullopt);

/// Critical replication z-value given the original z-value: success iff
/// zr >= threshold. Returns +inf when success is impossible and -inf when it
/// is guaranteed. Levels are clamped to [1e-15, 1 - 1e-15] before inversion.
double replication_critical_z(Method method, double zo, double alpha,
                              const std::optional<Weights>& w = std::nullopt,
                              std::optional<double> c = std::nullopt);

}  // namespace replisum
