#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace replisum {

enum class Method { TwoTrials, Edgington, EdgingtonWeighted, Fisher, MetaAnalysis };

inline constexpr Method kAllMethods[] = {Method::TwoTrials, Method::Edgington,
                                         Method::EdgingtonWeighted, Method::Fisher,
                                         Method::MetaAnalysis};

/// CLI / file token: two-trials, edgington, edgington-weighted, fisher, meta.
std::string_view to_string(Method m);
/// Inverse of to_string; throws UsageError on an unknown name.
Method parse_method(std::string_view name);

/// Positive weight pair for the weighted sum wo*po + wr*pr, with wo <= wr.
class Weights {
 public:
  Weights() = default;
  /// Throws DomainError unless 0 < wo <= wr and both finite.
  Weights(double wo, double wr);

  double wo() const noexcept { return wo_; }
  double wr() const noexcept { return wr_; }
  /// wr / wo; the combined p-value depends on the weights only through this.
  double ratio() const noexcept { return wr_ / wo_; }

 private:
  double wo_ = 1.0;
  double wr_ = 1.0;
};

/// One-sided original and replication p-values, optionally with the
/// variance ratio c = var_o / var_r (about n_r / n_o).
struct StudyPair {
  double po;
  double pr;
  std::optional<double> c;
};

/// Throws DomainError unless 0 < po, pr < 1 and c (if given) is finite and > 0.
StudyPair make_study_pair(double po, double pr, std::optional<double> c = std::nullopt);

struct MethodResult {
  Method method;
  double p_combined;
  double overall_level;  // alpha^2
  bool success;          // p_combined <= overall_level
};

}  // namespace replisum
