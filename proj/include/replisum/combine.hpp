#pragma once

#include <optional>

#include "replisum/types.hpp"

namespace replisum {

// Combined p-values for one original/replication pair. Each is a valid
// p-value (uniform under the intersection null), so thresholding at alpha^2
// gives overall Type-I error control at alpha^2.

/// Two-trials rule: max(po, pr)^2.
double p_two_trials(const StudyPair& pair);

/// Edgington: Irwin-Hall(2) CDF of po + pr.
double p_edgington(const StudyPair& pair);

/// Weighted Edgington: trapezoidal CDF of wo*po + wr*pr.
double p_edgington_weighted(const StudyPair& pair, const Weights& w);

/// Fisher: chi^2_4 upper tail of -2 log(po*pr), i.e. q (1 - log q) with q = po*pr.
double p_fisher(const StudyPair& pair);

/// Fixed-effect meta-analysis (weighted Stouffer), z = (zo + sqrt(c) zr) / sqrt(1 + c).
/// Throws UsageError when pair.c is missing.
double p_meta_analysis(const StudyPair& pair);

/// Dispatch on method. `w` defaults to (1, 2) for EdgingtonWeighted.
double combined_p(const StudyPair& pair, Method method,
                  const std::optional<Weights>& w = std::nullopt);

/// Largest po + pr compatible with success at alpha^2: sqrt(2) * alpha.
double budget(double alpha);

/// Largest wo*po + wr*pr compatible with success: sqrt(2 wo wr) * alpha.
/// Throws DomainError when the result exceeds wo (first-branch inversion invalid).
double budget_weighted(double alpha, const Weights& w);

/// Combined p-value and verdict at overall level alpha^2 (success is inclusive).
MethodResult assess(const StudyPair& pair, Method method, double alpha,
                    const std::optional<Weights>& w = std::nullopt);

/// Default weights for the weighted method: replication counts twice.
inline Weights default_weights() { return Weights(1.0, 2.0); }

}  // namespace replisum
