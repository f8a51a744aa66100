#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "replisum/types.hpp"

namespace replisum {

/// Budget b for the sum of k p-values: Irwin-Hall(k) CDF at b equals alpha^2,
/// i.e. (k! alpha^2)^(1/k). Throws DomainError when b would exceed 1.
double budget_k(double alpha, int k);

/// Two-stage alpha-spending with one original and up to two replications.
/// A fraction gamma of alpha^2 is spent on E2 = po + pr1 <= b2; the rest on
/// E2 > b2, E3 = E2 + pr2 <= b3.
struct SpendingPlan {
  double alpha;
  double gamma;
  double b2;
  double b3;
};

/// b2 = sqrt(2 gamma) alpha; b3 solves b3^3/6 - b2^2 b3/2 + b2^3/3 = (1 - gamma) alpha^2.
SpendingPlan spending_plan(double alpha, double gamma);

enum class Verdict { StopSuccess, StopFutility, Continue };

std::string_view to_string(Verdict v);

struct StageDecision {
  Verdict verdict;
  std::optional<double> next_level;  // b3 - E2, present iff Continue
};

/// E2 <= b2: success; E2 >= b3: futility; otherwise run a second replication
/// at level b3 - E2.
StageDecision stage_decision(double e2, const SpendingPlan& plan);

/// Edgington with three p-values: Irwin-Hall(3) CDF of po + pr1 + pr2 against alpha^2.
MethodResult assess_three(double po, double pr1, double pr2, double alpha);

struct SpendingRow {
  double gamma;
  double b2;
  double b3;
};

std::vector<SpendingRow> spending_curve(double alpha, std::span<const double> gammas);

/// Header: gamma,b2,b3
void write_spending_csv(std::ostream& out, std::span<const SpendingRow> rows);

}  // namespace replisum
