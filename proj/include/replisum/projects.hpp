#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "replisum/types.hpp"

namespace replisum {

/// One row of a replication-project dataset. Either the correlation form
/// (ro, no, rr, nr) or the bypass form (po, pr, optional c) is populated;
/// when both are present the correlation form is used.
struct StudyRecord {
  std::string project;
  std::string study;
  std::optional<double> ro;
  std::optional<int> no;
  std::optional<double> rr;
  std::optional<int> nr;
  std::optional<double> po;
  std::optional<double> pr;
  std::optional<double> c;
  int line = 0;
};

struct RowError {
  int line;
  std::string message;
};

struct IngestResult {
  std::vector<StudyRecord> records;
  std::vector<RowError> errors;
};

/// Parses a CSV with header `project,study,ro,no,rr,nr` or
/// `project,study,po,pr,c` (extra columns are ignored). Row problems are
/// collected with their line numbers; an empty input or a header without
/// either column set throws UsageError.
IngestResult ingest_csv(std::istream& in);

/// Throws DataError unless the record is usable (|r| < 1, n > 3, p in (0, 1)).
void validate(const StudyRecord& rec);

/// One-sided p-values oriented by the sign of the original estimate, via
/// Fisher's z-transformation with standard error 1 / sqrt(n - 3);
/// c = (nr - 3) / (no - 3). Bypass records are passed through.
StudyPair to_study_pair(const StudyRecord& rec);

struct LabeledPair {
  std::string project;
  std::string study;
  StudyPair pair;
};

std::vector<LabeledPair> to_labeled_pairs(std::span<const StudyRecord> records);

// ---------------------------------------------------------------------------
// Analyses

struct ThresholdRate {
  double threshold;
  int n_below;          // po <= threshold
  int significant_below;
  std::optional<double> rate_below;  // absent for an empty group
  int n_above;
  int significant_above;
  std::optional<double> rate_above;
};

/// Share of pr <= replication_alpha among pairs with po <= t and with po > t.
std::vector<ThresholdRate> replication_rate_by_threshold(std::span<const LabeledPair> pairs,
                                                        std::span<const double> thresholds,
                                                        double replication_alpha = 0.025);

struct SuccessRate {
  std::string project;
  Method method;
  double alpha_sq;
  int n;  // pairs the method applies to (meta-analysis needs c)
  int successes;
  std::optional<double> rate;
};

/// Per (project, method, alpha^2): fraction with combined p <= alpha^2.
/// Projects appear in order of first occurrence.
std::vector<SuccessRate> success_rates(std::span<const LabeledPair> pairs,
                                       std::span<const Method> methods,
                                       std::span<const double> alpha_sq_grid,
                                       const Weights& w = Weights(1.0, 2.0));

struct AnalysisRow {
  std::string project;
  std::string study;
  double po;
  double pr;
  std::vector<MethodResult> results;  // one per requested method that applies
  bool wrong_direction;               // pr > 0.5
};

/// Pairs with pr > replication_alpha, with combined p-values and verdicts at
/// overall level alpha^2.
std::vector<AnalysisRow> combined_pvalue_table(std::span<const LabeledPair> pairs,
                                               std::span<const Method> methods,
                                               double alpha = 0.025,
                                               const Weights& w = Weights(1.0, 2.0));

struct AnalysisSummary {
  int n_pairs;
  int n_po_below_1e6;             // po < 1e-6
  int n_discordant;               // Edgington and two-trials disagree at alpha^2
  std::vector<std::string> discordant_studies;
  std::optional<double> min_pe_nonsignificant;  // min p_E over pr > alpha
  int fisher_successes_wrong_direction;         // success with pr > 0.5
  int meta_successes_wrong_direction;
};

AnalysisSummary summarize(std::span<const LabeledPair> pairs, double alpha = 0.025);

// Output. Headers:
//   rates_by_threshold.csv: threshold,n_below,significant_below,rate_below,n_above,significant_above,rate_above
//   success_rates.csv:      project,method,alpha_sq,n,successes,rate,rate_percent
//   combined_pvalues.csv:   project,study,po,pr,p_two_trials,p_edgington,p_edgington_weighted,p_fisher,p_meta,
//                           success_two_trials,success_edgington,success_edgington_weighted,success_fisher,success_meta,wrong_direction
// JSON mirrors use the same field names.
void write_rates_csv(std::ostream& out, std::span<const ThresholdRate> rows);
void write_success_csv(std::ostream& out, std::span<const SuccessRate> rows);
void write_combined_csv(std::ostream& out, std::span<const AnalysisRow> rows);

nlohmann::json to_json(std::span<const ThresholdRate> rows);
nlohmann::json to_json(std::span<const SuccessRate> rows);
nlohmann::json to_json(std::span<const AnalysisRow> rows);
nlohmann::json to_json(const AnalysisSummary& s);

/// Rounds to `digits` significant digits (used for JSON probabilities).
double round_sig(double v, int digits = 6);

}  // namespace replisum
