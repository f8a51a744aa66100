#include "replisum/sequential.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <ostream>
#include <string>

#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

// Pr(E2 > b2, E2 + U <= b3) under the null, valid for b2 <= b3 <= 1.
double second_stage_mass(double b2, double b3) {
  return b3 * b3 * b3 / 6.0 - b2 * b2 * b3 / 2.0 + b2 * b2 * b2 / 3.0;
}

}  // namespace

double budget_k(double alpha, int k) {
  check_alpha(alpha);
  if (k < 1 || k > 10) throw DomainError("k must lie in [1, 10]");
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) factorial *= i;
  const double b = std::pow(factorial * alpha * alpha, 1.0 / k);
  if (b > 1.0)
    throw DomainError("alpha too large: budget for " + std::to_string(k) + " studies exceeds 1");
  return b;
}

SpendingPlan spending_plan(double alpha, double gamma) {
  check_alpha(alpha);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  const double b2 = std::sqrt(2.0 * gamma) * alpha;
  if (b2 > 1.0) throw DomainError("alpha too large for the first-stage budget");
  const double rest = (1.0 - gamma) * alpha * alpha;
  if (rest <= 0.0) return SpendingPlan{alpha, gamma, b2, b2};

  const auto gap = [&](double b3) { return second_stage_mass(b2, b3) - rest; };
  if (gap(1.0) < 0.0) throw NumericalError("second-stage budget exceeds 1; bracket [b2, 1] fails");
  const auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::abs(b); };
  const auto [lo, hi] = boost::math::tools::bisect(gap, b2, 1.0, tol);
  return SpendingPlan{alpha, gamma, b2, 0.5 * (lo + hi)};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::StopSuccess: return "stop-success";
    case Verdict::StopFutility: return "stop-futility";
    case Verdict::Continue: return "continue";
  }
  return "unknown";
}

StageDecision stage_decision(double e2, const SpendingPlan& plan) {
  if (!(e2 >= 0.0)) throw DomainError("E2 must be non-negative");
  if (e2 <= plan.b2) return {Verdict::StopSuccess, std::nullopt};
  if (e2 >= plan.b3) return {Verdict::StopFutility, std::nullopt};
  return {Verdict::Continue, plan.b3 - e2};
}

MethodResult assess_three(double po, double pr1, double pr2, double alpha) {
  check_alpha(alpha);
  for (double p : {po, pr1, pr2})
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p-values must lie strictly inside (0, 1)");
  const double p = irwin_hall_cdf(po + pr1 + pr2, 3);
  const double level = alpha * alpha;
  return MethodResult{Method::Edgington, p, level, p <= level};
}

std::vector<SpendingRow> spending_curve(double alpha, std::span<const double> gammas) {
  std::vector<SpendingRow> rows;
  rows.reserve(gammas.size());
  for (double g : gammas) {
    const SpendingPlan plan = spending_plan(alpha, g);
    rows.push_back({g, plan.b2, plan.b3});
  }
  return rows;
}

void write_spending_csv(std::ostream& out, std::span<const SpendingRow> rows) {
  out << "gamma,b2,b3\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) out << r.gamma << ',' << r.b2 << ',' << r.b3 << '\n';
  out.precision(precision);
}

}  // namespace replisum
