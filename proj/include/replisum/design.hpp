#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "replisum/types.hpp"

namespace replisum {

enum class PowerType { Conditional, Predictive };

std::string_view to_string(PowerType t);

/// Replication sample-size problem. Sizing is supported for the two-trials
/// rule and (weighted) Edgington, whose success region in pr is an interval
/// [0, level(po)].
struct DesignInput {
  double po = 0.025;
  double alpha = 0.025;
  double target_power = 0.8;
  Method method = Method::TwoTrials;
  std::optional<Weights> w;
  PowerType power_type = PowerType::Conditional;
  std::optional<double> theta_o;  // original effect estimate
  std::optional<double> tau;      // common standard deviation
  std::optional<int> no;          // original per-group sample size
  double shrinkage = 0.0;         // fractional reduction of the original effect, [0, 1)
};

/// Replication level replacing alpha in the usual formulas: alpha (two-trials),
/// sqrt(2) alpha - po (Edgington), (b_w - wo po) / wr (weighted).
/// Throws DomainError when success is impossible (level 0) and UsageError for
/// Fisher or meta-analysis.
double adjusted_level(Method method, double po, double alpha,
                      const std::optional<Weights>& w = std::nullopt);

/// c = (z_{1-level} + z_{1-beta})^2 / zo^2, zo shrunk by (1 - shrinkage).
double relative_sample_size_conditional(const DesignInput& in);

/// Phi((sqrt(c) zo - z_{1-level}) / sqrt(1 + c)): power averaged over the
/// predictive distribution N(sqrt(c) zo, 1 + c) of the replication z-value.
double predictive_power(double zo, double c, double level);

/// Smallest c reaching the target predictive power. Throws UnattainableError
/// (carrying Phi(zo)) when the target is at or above the c -> infinity ceiling.
double relative_sample_size_predictive(const DesignInput& in);

/// Dispatches on in.power_type.
double relative_sample_size(const DesignInput& in);

/// Per-group replication size. With theta_o and tau (conditional power):
/// ceil(2 tau^2 (z_{1-level} + z_{1-beta})^2 / ((1 - shrinkage) theta_o)^2).
/// Otherwise ceil(c * no) from the relative size.
long absolute_sample_size(const DesignInput& in);

/// Method's conditional c divided by the two-trials c (zo cancels).
double sample_size_ratio_conditional(double po, double alpha, double target_power, Method method,
                                     const std::optional<Weights>& w = std::nullopt);

/// Same ratio under predictive power.
double sample_size_ratio_predictive(double po, double alpha, double target_power, Method method,
                                    const std::optional<Weights>& w = std::nullopt);

struct RatioRow {
  PowerType power_type;
  Method method;
  double target_power;
  double po;
  double ratio;
};

std::vector<RatioRow> sample_size_ratio_curve(PowerType type, Method method, double target_power,
                                              std::span<const double> pos, double alpha,
                                              const std::optional<Weights>& w = std::nullopt);

/// `steps` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int steps);

/// Header: power_type,method,target_power,po,ratio
void write_ratio_csv(std::ostream& out, std::span<const RatioRow> rows);

}  // namespace replisum
