#include "replisum/combine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::TwoTrials: return "two-trials";
    case Method::Edgington: return "edgington";
    case Method::EdgingtonWeighted: return "edgington-weighted";
    case Method::Fisher: return "fisher";
    case Method::MetaAnalysis: return "meta";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw UsageError("unknown method '" + std::string(name) +
                   "' (expected two-trials, edgington, edgington-weighted, fisher or meta)");
}

Weights::Weights(double wo, double wr) : wo_(wo), wr_(wr) {
  if (!std::isfinite(wo) || !std::isfinite(wr) || !(wo > 0.0) || !(wr > 0.0))
    throw DomainError("weights must be positive and finite");
  if (wo > wr) throw DomainError("weights must satisfy wo <= wr");
}

StudyPair make_study_pair(double po, double pr, std::optional<double> c) {
  if (!(po > 0.0 && po < 1.0)) throw DomainError("po must lie strictly inside (0, 1)");
  if (!(pr > 0.0 && pr < 1.0)) throw DomainError("pr must lie strictly inside (0, 1)");
  if (c && (!std::isfinite(*c) || !(*c > 0.0)))
    throw DomainError("variance ratio c must be finite and positive");
  return StudyPair{po, pr, c};
}

double p_two_trials(const StudyPair& pair) {
  const double m = std::max(pair.po, pair.pr);
  return m * m;
}

double p_edgington(const StudyPair& pair) { return irwin_hall_cdf(pair.po + pair.pr, 2); }

double p_edgington_weighted(const StudyPair& pair, const Weights& w) {
  const double ratio = w.ratio();
  return trapezoid_cdf(pair.po + ratio * pair.pr, 1.0, ratio);
}

double p_fisher(const StudyPair& pair) {
  const double q = pair.po * pair.pr;
  return std::clamp(q * (1.0 - std::log(q)), 0.0, 1.0);
}

double p_meta_analysis(const StudyPair& pair) {
  if (!pair.c) throw UsageError("meta-analysis requires the variance ratio c");
  const double c = *pair.c;
  const double z = (norm_isf(pair.po) + std::sqrt(c) * norm_isf(pair.pr)) / std::sqrt(1.0 + c);
  return norm_sf(z);
}

double combined_p(const StudyPair& pair, Method method, const std::optional<Weights>& w) {
  switch (method) {
    case Method::TwoTrials: return p_two_trials(pair);
    case Method::Edgington: return p_edgington(pair);
    case Method::EdgingtonWeighted: return p_edgington_weighted(pair, w.value_or(default_weights()));
    case Method::Fisher: return p_fisher(pair);
    case Method::MetaAnalysis: return p_meta_analysis(pair);
  }
  throw UsageError("unknown method");
}

double budget(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("alpha must lie in (0, 0.5]");
  return std::sqrt(2.0) * alpha;
}

double budget_weighted(double alpha, const Weights& w) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double b = std::sqrt(2.0 * w.wo() * w.wr()) * alpha;
  if (b > w.wo())
    throw DomainError("alpha too large for these weights: budget " + std::to_string(b) +
                      " exceeds wo");
  return b;
}

MethodResult assess(const StudyPair& pair, Method method, double alpha,
                    const std::optional<Weights>& w) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double p = combined_p(pair, method, w);
  const double level = alpha * alpha;
  return MethodResult{method, p, level, p <= level};
}

}  // namespace replisum
