#include "replisum/projects.hpp"

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "replisum/combine.hpp"
#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
  for (const auto& f : tok) fields.push_back(trim(f));
  return fields;
}

std::optional<double> parse_real(const std::string& s, const char* column) {
  if (s.empty() || s == "NA") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw DataError(std::string("malformed number in column '") + column + "': '" + s + "'");
  return v;
}

std::optional<int> parse_count(const std::string& s, const char* column) {
  const auto v = parse_real(s, column);
  if (!v) return std::nullopt;
  if (*v != std::floor(*v) || std::abs(*v) > 1e9)
    throw DataError(std::string("column '") + column + "' must be an integer, got '" + s + "'");
  return static_cast<int>(*v);
}

// Keeps p strictly inside (0, 1) when a tail probability under- or overflows.
double keep_open(double p) { return std::clamp(p, 1e-300, 1.0 - 0x1p-53); }

bool has_correlation_form(const StudyRecord& r) { return r.ro && r.no && r.rr && r.nr; }

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

nlohmann::json json_optional(const std::optional<double>& v) {
  return v ? nlohmann::json(round_sig(*v)) : nlohmann::json(nullptr);
}

const MethodResult* find_result(const AnalysisRow& row, Method m) {
  for (const auto& r : row.results)
    if (r.method == m) return &r;
  return nullptr;
}

std::string column_name(std::string_view prefix, Method m) {
  std::string name(prefix);
  for (char ch : to_string(m)) name += ch == '-' ? '_' : ch;
  return name;
}

}  // namespace

IngestResult ingest_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw UsageError("input CSV is empty");

  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  const auto has = [&](const char* name) { return col.count(name) > 0; };
  if (!has("project") || !has("study"))
    throw UsageError("CSV header must contain 'project' and 'study'");
  const bool corr = has("ro") && has("no") && has("rr") && has("nr");
  const bool bypass = has("po") && has("pr");
  if (!corr && !bypass)
    throw UsageError("CSV header must be project,study,ro,no,rr,nr or project,study,po,pr,c");

  IngestResult result;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      const auto fields = split_csv(line);
      if (fields.size() != header.size()) {
        std::ostringstream msg;
        msg << "expected " << header.size() << " fields, found " << fields.size();
        throw DataError(msg.str());
      }
      const auto field = [&](const char* name) -> std::string {
        const auto it = col.find(name);
        return it == col.end() ? std::string() : fields[it->second];
      };
      StudyRecord rec;
      rec.line = line_no;
      rec.project = field("project");
      rec.study = field("study");
      rec.ro = parse_real(field("ro"), "ro");
      rec.no = parse_count(field("no"), "no");
      rec.rr = parse_real(field("rr"), "rr");
      rec.nr = parse_count(field("nr"), "nr");
      rec.po = parse_real(field("po"), "po");
      rec.pr = parse_real(field("pr"), "pr");
      rec.c = parse_real(field("c"), "c");
      validate(rec);
      result.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  if (result.records.empty() && result.errors.empty()) throw UsageError("input CSV has no data rows");
  return result;
}

void validate(const StudyRecord& rec) {
  if (has_correlation_form(rec)) {
    if (!(std::abs(*rec.ro) < 1.0) || !(std::abs(*rec.rr) < 1.0))
      throw DataError("correlations must satisfy |r| < 1");
    if (*rec.no <= 3 || *rec.nr <= 3)
      throw DataError("sample sizes must exceed 3 for the z-transformation");
    return;
  }
  if (rec.ro || rec.no || rec.rr || rec.nr) {
    if (!(rec.po && rec.pr)) throw DataError("incomplete correlation fields (need ro, no, rr, nr)");
  }
  if (!rec.po || !rec.pr) throw DataError("missing p-values (need po and pr)");
  if (!(*rec.po > 0.0 && *rec.po < 1.0) || !(*rec.pr > 0.0 && *rec.pr < 1.0))
    throw DataError("p-values must lie strictly inside (0, 1)");
  if (rec.c && !(*rec.c > 0.0)) throw DataError("variance ratio c must be positive");
}

StudyPair to_study_pair(const StudyRecord& rec) {
  validate(rec);
  if (has_correlation_form(rec)) {
    const double sign = *rec.ro >= 0.0 ? 1.0 : -1.0;
    const double zo = std::abs(std::atanh(*rec.ro)) * std::sqrt(*rec.no - 3.0);
    const double zr = sign * std::atanh(*rec.rr) * std::sqrt(*rec.nr - 3.0);
    return StudyPair{keep_open(norm_sf(zo)), keep_open(norm_sf(zr)),
                     (*rec.nr - 3.0) / (*rec.no - 3.0)};
  }
  return StudyPair{*rec.po, *rec.pr, rec.c};
}

std::vector<LabeledPair> to_labeled_pairs(std::span<const StudyRecord> records) {
  std::vector<LabeledPair> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.project, r.study, to_study_pair(r)});
  return out;
}

std::vector<ThresholdRate> replication_rate_by_threshold(std::span<const LabeledPair> pairs,
                                                        std::span<const double> thresholds,
                                                        double replication_alpha) {
  if (pairs.empty()) throw UsageError("no study pairs to analyse");
  std::vector<ThresholdRate> rows;
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("thresholds must lie in (0, 1)");
    ThresholdRate row{t, 0, 0, std::nullopt, 0, 0, std::nullopt};
    for (const auto& lp : pairs) {
      const bool sig = lp.pair.pr <= replication_alpha;
      if (lp.pair.po <= t) {
        ++row.n_below;
        row.significant_below += sig;
      } else {
        ++row.n_above;
        row.significant_above += sig;
      }
    }
    if (row.n_below > 0) row.rate_below = static_cast<double>(row.significant_below) / row.n_below;
    if (row.n_above > 0) row.rate_above = static_cast<double>(row.significant_above) / row.n_above;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SuccessRate> success_rates(std::span<const LabeledPair> pairs,
                                       std::span<const Method> methods,
                                       std::span<const double> alpha_sq_grid, const Weights& w) {
  std::vector<std::string> projects;
  for (const auto& lp : pairs)
    if (std::find(projects.begin(), projects.end(), lp.project) == projects.end())
      projects.push_back(lp.project);

  std::vector<SuccessRate> rows;
  for (const auto& project : projects) {
    for (Method m : methods) {
      // Combined p-values do not depend on alpha^2; compute once per pair.
      std::vector<double> ps;
      for (const auto& lp : pairs) {
        if (lp.project != project) continue;
        if (m == Method::MetaAnalysis && !lp.pair.c) continue;
        ps.push_back(combined_p(lp.pair, m, w));
      }
      for (double a2 : alpha_sq_grid) {
        SuccessRate row{project, m, a2, static_cast<int>(ps.size()), 0, std::nullopt};
        row.successes = static_cast<int>(std::count_if(ps.begin(), ps.end(),
                                                       [a2](double p) { return p <= a2; }));
        if (row.n > 0) row.rate = static_cast<double>(row.successes) / row.n;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<AnalysisRow> combined_pvalue_table(std::span<const LabeledPair> pairs,
                                               std::span<const Method> methods, double alpha,
                                               const Weights& w) {
  std::vector<AnalysisRow> rows;
  for (const auto& lp : pairs) {
    if (!(lp.pair.pr > alpha)) continue;
    AnalysisRow row{lp.project, lp.study, lp.pair.po, lp.pair.pr, {}, lp.pair.pr > 0.5};
    for (Method m : methods) {
      if (m == Method::MetaAnalysis && !lp.pair.c) continue;
      row.results.push_back(assess(lp.pair, m, alpha, w));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

AnalysisSummary summarize(std::span<const LabeledPair> pairs, double alpha) {
  AnalysisSummary s{static_cast<int>(pairs.size()), 0, 0, {}, std::nullopt, 0, 0};
  const Weights w = default_weights();
  for (const auto& lp : pairs) {
    const StudyPair& p = lp.pair;
    if (p.po < 1e-6) ++s.n_po_below_1e6;
    const bool two = assess(p, Method::TwoTrials, alpha).success;
    const bool edg = assess(p, Method::Edgington, alpha).success;
    if (two != edg) {
      ++s.n_discordant;
      s.discordant_studies.push_back(lp.project + "/" + lp.study);
    }
    if (p.pr > alpha) {
      const double pe = p_edgington(p);
      if (!s.min_pe_nonsignificant || pe < *s.min_pe_nonsignificant) s.min_pe_nonsignificant = pe;
    }
    if (p.pr > 0.5) {
      if (assess(p, Method::Fisher, alpha).success) ++s.fisher_successes_wrong_direction;
      if (p.c && assess(p, Method::MetaAnalysis, alpha, w).success)
        ++s.meta_successes_wrong_direction;
    }
  }
  return s;
}

void write_rates_csv(std::ostream& out, std::span<const ThresholdRate> rows) {
  out << "threshold,n_below,significant_below,rate_below,n_above,significant_above,rate_above\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.threshold << ',' << r.n_below << ',' << r.significant_below << ',';
    write_optional(out, r.rate_below);
    out << ',' << r.n_above << ',' << r.significant_above << ',';
    write_optional(out, r.rate_above);
    out << '\n';
  }
  out.precision(precision);
}

void write_success_csv(std::ostream& out, std::span<const SuccessRate> rows) {
  out << "project,method,alpha_sq,n,successes,rate,rate_percent\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.project << ',' << to_string(r.method) << ',' << r.alpha_sq << ',' << r.n << ','
        << r.successes << ',';
    write_optional(out, r.rate);
    out << ',';
    if (r.rate) {
      std::ostringstream pct;
      pct.setf(std::ios::fixed);
      pct.precision(1);
      pct << 100.0 * *r.rate;
      out << pct.str();
    }
    out << '\n';
  }
  out.precision(precision);
}

void write_combined_csv(std::ostream& out, std::span<const AnalysisRow> rows) {
  out << "project,study,po,pr";
  for (Method m : kAllMethods) out << ',' << column_name("p_", m);
  for (Method m : kAllMethods) out << ',' << column_name("success_", m);
  out << ",wrong_direction\n";
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    out << r.project << ',' << r.study << ',' << r.po << ',' << r.pr;
    for (Method m : kAllMethods) {
      out << ',';
      if (const auto* res = find_result(r, m)) out << res->p_combined;
    }
    for (Method m : kAllMethods) {
      out << ',';
      if (const auto* res = find_result(r, m)) out << (res->success ? "true" : "false");
    }
    out << ',' << (r.wrong_direction ? "true" : "false") << '\n';
  }
  out.precision(precision);
}

nlohmann::json to_json(std::span<const ThresholdRate> rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"threshold", r.threshold},
                   {"n_below", r.n_below},
                   {"significant_below", r.significant_below},
                   {"rate_below", json_optional(r.rate_below)},
                   {"n_above", r.n_above},
                   {"significant_above", r.significant_above},
                   {"rate_above", json_optional(r.rate_above)}});
  return arr;
}

nlohmann::json to_json(std::span<const SuccessRate> rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json pct = nullptr;
    if (r.rate) pct = std::round(1000.0 * *r.rate) / 10.0;
    arr.push_back({{"project", r.project},
                   {"method", to_string(r.method)},
                   {"alpha_sq", r.alpha_sq},
                   {"n", r.n},
                   {"successes", r.successes},
                   {"rate", json_optional(r.rate)},
                   {"rate_percent", pct}});
  }
  return arr;
}

nlohmann::json to_json(std::span<const AnalysisRow> rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json obj{{"project", r.project},
                       {"study", r.study},
                       {"po", round_sig(r.po)},
                       {"pr", round_sig(r.pr)}};
    for (Method m : kAllMethods) {
      const auto* res = find_result(r, m);
      obj[column_name("p_", m)] = res ? nlohmann::json(round_sig(res->p_combined)) : nullptr;
    }
    for (Method m : kAllMethods) {
      const auto* res = find_result(r, m);
      obj[column_name("success_", m)] = res ? nlohmann::json(res->success) : nullptr;
    }
    obj["wrong_direction"] = r.wrong_direction;
    arr.push_back(std::move(obj));
  }
  return arr;
}

nlohmann::json to_json(const AnalysisSummary& s) {
  return {{"n_pairs", s.n_pairs},
          {"n_po_below_1e-6", s.n_po_below_1e6},
          {"n_discordant", s.n_discordant},
          {"discordant_studies", s.discordant_studies},
          {"min_pe_nonsignificant", json_optional(s.min_pe_nonsignificant)},
          {"fisher_successes_wrong_direction", s.fisher_successes_wrong_direction},
          {"meta_successes_wrong_direction", s.meta_successes_wrong_direction}};
}

double round_sig(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

}  // namespace replisum
