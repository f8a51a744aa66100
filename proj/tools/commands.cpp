#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "replisum/combine.hpp"
#include "replisum/conditional.hpp"
#include "replisum/design.hpp"
#include "replisum/error.hpp"
#include "replisum/power.hpp"
#include "replisum/projects.hpp"
#include "replisum/sequential.hpp"
#include "replisum/sim.hpp"

namespace replisum::cli {

namespace {

using Json = nlohmann::ordered_json;

enum class Format { Text, Json, Csv };

// ---------------------------------------------------------------------------
// Rendering

std::string number(double v, int digits) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

std::string scalar(const Json& v, int digits) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return number(v.get<double>(), digits);
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& el : v) joined += (joined.empty() ? "" : ";") + scalar(el, digits);
    return joined;
  }
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return quoted + '"';
}

Json rounded(const Json& j) {
  if (j.is_number_float()) return round_sig(j.get<double>());
  if (j.is_array() || j.is_object()) {
    Json copy = j;
    for (auto& el : copy) el = rounded(el);
    return copy;
  }
  return j;
}

std::vector<Json> as_rows(const Json& j) {
  if (j.is_array()) return {j.begin(), j.end()};
  return {j};
}

void write_csv(std::ostream& out, const Json& j) {
  const auto rows = as_rows(j);
  if (rows.empty()) return;
  std::vector<std::string> keys;
  for (const auto& item : rows.front().items()) keys.push_back(item.key());
  for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      out << (i ? "," : "") << csv_field(scalar(row.value(keys[i], Json()), 10));
    out << '\n';
  }
}

void write_text(std::ostream& out, const Json& j) {
  const auto cell = [](const Json& v) {
    return v.is_null() || (v.is_array() && v.empty()) ? std::string("-") : scalar(v, 6);
  };
  if (j.is_object()) {
    std::size_t width = 0;
    for (const auto& item : j.items()) width = std::max(width, item.key().size());
    for (const auto& item : j.items())
      out << std::left << std::setw(static_cast<int>(width + 2)) << item.key() << cell(item.value())
          << '\n';
    return;
  }
  const auto rows = as_rows(j);
  if (rows.empty()) {
    out << "(no rows)\n";
    return;
  }
  std::vector<std::string> keys;
  for (const auto& item : rows.front().items()) keys.push_back(item.key());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) width[i] = keys[i].size();
  for (const auto& row : rows) {
    auto& line = cells.emplace_back();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      line.push_back(cell(row.value(keys[i], Json())));
      width[i] = std::max(width[i], line.back().size());
    }
  }
  const auto print = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i + 1 < line.size())
        out << std::left << std::setw(static_cast<int>(width[i] + 2)) << line[i];
      else
        out << line[i];
    }
    out << '\n';
  };
  print(keys);
  for (const auto& line : cells) print(line);
}

void emit(std::ostream& out, Format f, const Json& j) {
  switch (f) {
    case Format::Json: out << rounded(j).dump(2) << '\n'; break;
    case Format::Csv: write_csv(out, j); break;
    case Format::Text: write_text(out, j); break;
  }
}

Json single_or_array(Json rows) { return rows.size() == 1 ? rows[0] : rows; }

Json ordered(const nlohmann::json& j) { return Json::parse(j.dump()); }

std::string name(Method m) { return std::string(to_string(m)); }

// ---------------------------------------------------------------------------
// Shared option groups

struct MethodOptions {
  std::string method;
  double alpha = 0.025;
  double wo = 1.0;
  double wr = 2.0;
  std::optional<double> c;
};

void add_method_options(CLI::App* sub, MethodOptions& o, bool with_c) {
  sub->add_option("--method", o.method,
                  "two-trials, edgington, edgington-weighted, fisher or meta (default: all)");
  sub->add_option("--alpha", o.alpha, "one-sided significance level per study")
      ->capture_default_str();
  sub->add_option("--wo", o.wo, "weight of the original study")->capture_default_str();
  sub->add_option("--wr", o.wr, "weight of the replication study")->capture_default_str();
  if (with_c) sub->add_option("--c", o.c, "variance ratio sigma_o^2 / sigma_r^2 (meta-analysis)");
}

std::vector<Method> selected_methods(const MethodOptions& o, bool meta_needs_c) {
  if (!o.method.empty()) return {parse_method(o.method)};
  std::vector<Method> methods;
  for (Method m : kAllMethods)
    if (m != Method::MetaAnalysis || o.c || !meta_needs_c) methods.push_back(m);
  return methods;
}

int whole_steps(double v, const char* what) {
  if (!(v >= 2.0) || v != std::floor(v) || v > 1e6)
    throw UsageError(std::string(what) + ": steps must be an integer >= 2");
  return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// combine / level

struct CombineOptions {
  MethodOptions m;
  double po = 0.0;
  double pr = 0.0;
};

Json run_combine(const CombineOptions& o) {
  const StudyPair pair = make_study_pair(o.po, o.pr, o.m.c);
  const Weights w(o.m.wo, o.m.wr);
  Json rows = Json::array();
  for (Method m : selected_methods(o.m, true)) {
    const MethodResult r = assess(pair, m, o.m.alpha, w);
    Json row{{"method", name(m)}, {"po", o.po}, {"pr", o.pr}};
    if (o.m.c) row["c"] = *o.m.c;
    row["p"] = r.p_combined;
    row["threshold"] = r.overall_level;
    row["success"] = r.success;
    rows.push_back(std::move(row));
  }
  return single_or_array(std::move(rows));
}

struct LevelOptions {
  MethodOptions m;
  double po = 0.0;
};

Json run_level(const LevelOptions& o) {
  const Weights w(o.m.wo, o.m.wr);
  Json rows = Json::array();
  for (Method m : selected_methods(o.m, true)) {
    const ConditionalLevel l = conditional_level(m, o.po, o.m.alpha, w, o.m.c);
    rows.push_back({{"method", name(m)}, {"po", o.po}, {"alpha", o.m.alpha}, {"level", l.level}});
  }
  return single_or_array(std::move(rows));
}

// ---------------------------------------------------------------------------
// power

struct PowerOptions {
  MethodOptions m;
  double original_power = 0.8;
  double c = 1.0;
  double d = 1.0;
  std::vector<double> curve;
};

void run_power(const PowerOptions& o, Format f, std::ostream& out) {
  PowerScenario base;
  base.original_power = o.original_power;
  base.c = o.c;
  base.d = o.d;
  base.alpha = o.m.alpha;
  base.w = Weights(o.m.wo, o.m.wr);
  std::vector<double> cs{o.c};
  if (!o.curve.empty()) cs = linear_grid(o.curve[0], o.curve[1], whole_steps(o.curve[2], "--curve"));
  const auto methods = selected_methods(o.m, false);
  const auto rows = power_curve(methods, cs, base);
  if (f == Format::Csv) {
    write_power_csv(out, rows);
    return;
  }
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"method", name(r.method)},
                   {"c", r.c},
                   {"d", r.d},
                   {"original_power", r.original_power},
                   {"alpha", r.alpha},
                   {"project_power", r.project_power}});
  emit(out, f, single_or_array(std::move(arr)));
}

// ---------------------------------------------------------------------------
// samplesize

struct SampleSizeOptions {
  MethodOptions m;
  std::optional<double> po;
  double power = 0.8;
  bool predictive = false;
  std::optional<double> theta;
  std::optional<double> tau;
  std::optional<int> no;
  double shrinkage = 0.0;
  std::vector<double> ratio_curve;
};

void run_samplesize(const SampleSizeOptions& o, Format f, std::ostream& out) {
  const Method method = o.m.method.empty() ? Method::TwoTrials : parse_method(o.m.method);
  const Weights w(o.m.wo, o.m.wr);
  const PowerType type = o.predictive ? PowerType::Predictive : PowerType::Conditional;

  if (!o.ratio_curve.empty()) {
    const auto pos =
        log_grid(o.ratio_curve[0], o.ratio_curve[1], whole_steps(o.ratio_curve[2], "--ratio-curve"));
    const auto rows = sample_size_ratio_curve(type, method, o.power, pos, o.m.alpha, w);
    if (f == Format::Csv) {
      write_ratio_csv(out, rows);
      return;
    }
    Json arr = Json::array();
    for (const auto& r : rows)
      arr.push_back({{"power_type", std::string(to_string(r.power_type))},
                     {"method", name(r.method)},
                     {"target_power", r.target_power},
                     {"po", r.po},
                     {"ratio", r.ratio}});
    emit(out, f, arr);
    return;
  }

  if (!o.po) throw UsageError("samplesize: --po is required (or use --ratio-curve)");
  DesignInput in;
  in.po = *o.po;
  in.alpha = o.m.alpha;
  in.target_power = o.power;
  in.method = method;
  in.w = w;
  in.power_type = type;
  in.theta_o = o.theta;
  in.tau = o.tau;
  in.no = o.no;
  in.shrinkage = o.shrinkage;

  const double level = adjusted_level(method, in.po, in.alpha, w);
  const double c = relative_sample_size(in);
  const double ratio = type == PowerType::Conditional
                           ? sample_size_ratio_conditional(in.po, in.alpha, in.target_power, method, w)
                           : sample_size_ratio_predictive(in.po, in.alpha, in.target_power, method, w);
  Json row{{"method", name(method)},
           {"power_type", std::string(to_string(type))},
           {"po", in.po},
           {"alpha", in.alpha},
           {"target_power", in.target_power},
           {"adjusted_level", level},
           {"c", c},
           {"ratio_to_two_trials", ratio}};
  if (o.shrinkage != 0.0) row["shrinkage"] = o.shrinkage;
  if ((o.theta && o.tau) || o.no) row["n"] = absolute_sample_size(in);
  emit(out, f, row);
}

// ---------------------------------------------------------------------------
// sequential

struct SequentialOptions {
  double alpha = 0.025;
  double gamma = 0.5;
  std::optional<double> curve_steps;
  std::optional<double> e2;
  std::optional<double> po;
  std::optional<double> pr1;
  std::optional<double> pr2;
};

void run_plan(const SequentialOptions& o, Format f, std::ostream& out) {
  if (o.curve_steps) {
    const auto gammas = linear_grid(0.0, 1.0, whole_steps(*o.curve_steps, "--curve"));
    const auto rows = spending_curve(o.alpha, gammas);
    if (f == Format::Csv) {
      write_spending_csv(out, rows);
      return;
    }
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back({{"gamma", r.gamma}, {"b2", r.b2}, {"b3", r.b3}});
    emit(out, f, arr);
    return;
  }
  const SpendingPlan p = spending_plan(o.alpha, o.gamma);
  emit(out, f, Json{{"alpha", p.alpha}, {"gamma", p.gamma}, {"b2", p.b2}, {"b3", p.b3}});
}

Json run_decide(const SequentialOptions& o) {
  double e2 = 0.0;
  if (o.e2) {
    if (o.po || o.pr1) throw UsageError("sequential decide: give either --e2 or --po with --pr1");
    e2 = *o.e2;
  } else {
    if (!o.po || !o.pr1) throw UsageError("sequential decide: give --e2, or --po and --pr1");
    const StudyPair pair = make_study_pair(*o.po, *o.pr1, std::nullopt);
    e2 = pair.po + pair.pr;
  }
  if (!(e2 >= 0.0)) throw DomainError("E2 must be non-negative");
  const SpendingPlan p = spending_plan(o.alpha, o.gamma);
  const StageDecision d = stage_decision(e2, p);
  Json row{{"e2", e2}, {"b2", p.b2}, {"b3", p.b3}, {"verdict", std::string(to_string(d.verdict))}};
  row["next_level"] = d.next_level ? Json(*d.next_level) : Json();
  return row;
}

Json run_assess_three(const SequentialOptions& o) {
  if (!o.po || !o.pr1 || !o.pr2)
    throw UsageError("sequential assess: --po, --pr1 and --pr2 are required");
  const MethodResult r = assess_three(*o.po, *o.pr1, *o.pr2, o.alpha);
  return {{"po", *o.po},
          {"pr1", *o.pr1},
          {"pr2", *o.pr2},
          {"e3", *o.po + *o.pr1 + *o.pr2},
          {"p", r.p_combined},
          {"budget", budget_k(o.alpha, 3)},
          {"threshold", r.overall_level},
          {"success", r.success}};
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string input;
  std::vector<std::string> projects;
  std::string output_dir;
  std::string table = "summary";
  std::vector<double> thresholds{1e-6, 1e-5, 1e-4, 0.001, 0.005, 0.01, 0.025, 0.05};
  std::vector<double> alpha_sq;
  double alpha = 0.025;
  double wo = 1.0;
  double wr = 2.0;
  bool skip_invalid = false;
};

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path.string());
  writer(file);
  if (!file) throw DataError("failed writing " + path.string());
}

void run_analyze(const AnalyzeOptions& o, Format f, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.input, std::ios::binary);
  if (!in) throw DataError("cannot open input file " + o.input);
  IngestResult ingested = ingest_csv(in);
  for (const auto& e : ingested.errors) err << o.input << ':' << e.line << ": " << e.message << '\n';
  if (!ingested.errors.empty() && !o.skip_invalid) {
    std::ostringstream msg;
    msg << ingested.errors.size() << " row(s) failed validation (use --skip-invalid to drop them)";
    throw DataError(msg.str());
  }

  std::vector<StudyRecord> records;
  for (auto& r : ingested.records)
    if (o.projects.empty() ||
        std::find(o.projects.begin(), o.projects.end(), r.project) != o.projects.end())
      records.push_back(std::move(r));
  for (const auto& p : o.projects)
    if (std::none_of(records.begin(), records.end(),
                     [&](const StudyRecord& r) { return r.project == p; }))
      throw UsageError("project '" + p + "' has no rows in " + o.input);
  if (records.empty()) throw UsageError("no study pairs to analyse");

  const auto pairs = to_labeled_pairs(records);
  const Weights w(o.wo, o.wr);
  const double a2 = o.alpha * o.alpha;
  std::vector<double> grid = o.alpha_sq;
  if (grid.empty()) {
    grid = log_grid(1e-6, 1e-2, 41);
    grid.push_back(a2);
    std::sort(grid.begin(), grid.end());
  }

  const auto rates = replication_rate_by_threshold(pairs, o.thresholds, o.alpha);
  const auto success = success_rates(pairs, kAllMethods, grid, w);
  const auto combined = combined_pvalue_table(pairs, kAllMethods, o.alpha, w);
  const AnalysisSummary summary = summarize(pairs, o.alpha);

  if (!o.output_dir.empty()) {
    const std::filesystem::path dir(o.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + o.output_dir + ": " + ec.message());
    write_file(dir / "rates_by_threshold.csv", [&](std::ostream& s) { write_rates_csv(s, rates); });
    write_file(dir / "success_rates.csv", [&](std::ostream& s) { write_success_csv(s, success); });
    write_file(dir / "combined_pvalues.csv", [&](std::ostream& s) { write_combined_csv(s, combined); });
    write_file(dir / "rates_by_threshold.json",
               [&](std::ostream& s) { s << to_json(std::span(rates)).dump(2) << '\n'; });
    write_file(dir / "success_rates.json",
               [&](std::ostream& s) { s << to_json(std::span(success)).dump(2) << '\n'; });
    write_file(dir / "combined_pvalues.json",
               [&](std::ostream& s) { s << to_json(std::span(combined)).dump(2) << '\n'; });
    write_file(dir / "summary.json", [&](std::ostream& s) { s << to_json(summary).dump(2) << '\n'; });
  }

  if (o.table == "rates") {
    if (f == Format::Csv) return write_rates_csv(out, rates);
    return emit(out, f, ordered(to_json(std::span(rates))));
  }
  if (o.table == "success") {
    if (f == Format::Csv) return write_success_csv(out, success);
    return emit(out, f, ordered(to_json(std::span(success))));
  }
  if (o.table == "combined") {
    if (f == Format::Csv) return write_combined_csv(out, combined);
    return emit(out, f, ordered(to_json(std::span(combined))));
  }

  Json at_level = Json::array();
  for (const auto& r : success) {
    if (r.alpha_sq != a2) continue;
    at_level.push_back({{"project", r.project},
                        {"method", name(r.method)},
                        {"n", r.n},
                        {"successes", r.successes},
                        {"rate_percent", r.rate ? Json(std::round(1000.0 * *r.rate) / 10.0) : Json()}});
  }
  Json s = ordered(to_json(summary));
  if (f == Format::Json) {
    s["success_at_alpha_sq"] = at_level;
    return emit(out, f, s);
  }
  emit(out, f, s);
  if (f == Format::Text) {
    for (auto& row : at_level) {
      if (row["rate_percent"].is_null()) continue;
      std::ostringstream pct;
      pct << std::fixed << std::setprecision(1) << row["rate_percent"].get<double>();
      row["rate_percent"] = pct.str();
    }
    out << "\nsuccess rates at alpha^2 = " << number(a2, 6) << '\n';
    emit(out, f, at_level);
  }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> nsim;
  unsigned workers = 0;
};

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("REPLISUM_SEED");
  if (!raw || !*raw) return std::nullopt;
  const std::string s(raw);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError("REPLISUM_SEED must be a non-negative integer, got '" + s + "'");
  return v;
}

Truth parse_truth(const std::string& s) {
  if (s == "null") return Truth::Null;
  if (s == "conditional") return Truth::Conditional;
  if (s == "alternative") return Truth::Alternative;
  throw UsageError("unknown truth '" + s + "' (expected null, conditional or alternative)");
}

std::string truth_name(Truth t) {
  switch (t) {
    case Truth::Null: return "null";
    case Truth::Conditional: return "conditional";
    case Truth::Alternative: return "alternative";
  }
  return "?";
}

Json run_simulate(const SimulateOptions& o) {
  std::ifstream in(o.spec);
  if (!in) throw UsageError("cannot open simulation spec " + o.spec);
  nlohmann::json spec;
  try {
    spec = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("simulation spec is not valid JSON: " + std::string(e.what()));
  }
  if (!spec.is_object()) throw UsageError("simulation spec must be a JSON object");
  static const std::set<std::string> known{"method", "methods", "alpha", "wo", "wr", "c", "truth",
                                           "po", "mu", "original_power", "d",
                                           "require_positive_zo", "n_sim", "seed", "workers",
                                           "sequential"};
  for (const auto& item : spec.items())
    if (!known.count(item.key())) throw UsageError("unknown key in simulation spec: " + item.key());

  const auto get = [&](const nlohmann::json& obj, const char* key, auto fallback) {
    using T = decltype(fallback);
    if (!obj.contains(key)) return fallback;
    try {
      return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(std::string("simulation spec: bad value for '") + key + "'");
    }
  };

  std::uint64_t seed = 1;
  if (o.seed) {
    seed = *o.seed;
  } else if (spec.contains("seed")) {
    seed = get(spec, "seed", std::uint64_t{1});
  } else if (const auto env = env_seed()) {
    seed = *env;
  }
  const std::int64_t n_sim = o.nsim ? *o.nsim : get(spec, "n_sim", std::int64_t{1'000'000});
  if (n_sim < 1) throw UsageError("number of simulations must be at least 1");
  const unsigned workers = o.workers ? o.workers : get(spec, "workers", 0u);
  const double alpha = get(spec, "alpha", 0.025);

  if (spec.contains("sequential")) {
    const auto& seq = spec.at("sequential");
    if (!seq.is_object() || !seq.contains("gamma"))
      throw UsageError("simulation spec: 'sequential' must be an object with 'gamma'");
    const SpendingPlan plan = spending_plan(alpha, get(seq, "gamma", 0.0));
    const SimResult r = simulate_sequential(plan, n_sim, seed, workers);
    return {{"procedure", "sequential"}, {"alpha", alpha},         {"gamma", plan.gamma},
            {"b2", plan.b2},             {"b3", plan.b3},           {"rate", r.rate},
            {"se", r.se},                {"successes", r.successes}, {"n_sim", r.n_sim},
            {"seed", seed}};
  }

  std::vector<Method> methods;
  if (spec.contains("methods")) {
    for (const auto& m : get(spec, "methods", std::vector<std::string>{}))
      methods.push_back(parse_method(m));
  } else if (spec.contains("method")) {
    methods.push_back(parse_method(get(spec, "method", std::string())));
  }
  if (methods.empty()) throw UsageError("simulation spec needs 'method' or 'methods'");

  SimConfig cfg;
  cfg.alpha = alpha;
  cfg.w = Weights(get(spec, "wo", 1.0), get(spec, "wr", 2.0));
  if (spec.contains("c")) cfg.c = get(spec, "c", 1.0);
  cfg.truth = parse_truth(get(spec, "truth", std::string("null")));
  cfg.d = get(spec, "d", 1.0);
  cfg.require_positive_zo = get(spec, "require_positive_zo", false);
  cfg.n_sim = n_sim;
  cfg.seed = seed;
  cfg.workers = workers;
  if (cfg.truth == Truth::Conditional) {
    if (!spec.contains("po")) throw UsageError("conditional truth needs 'po'");
    cfg.po = get(spec, "po", 0.0);
  }
  if (cfg.truth == Truth::Alternative) {
    if (spec.contains("mu"))
      cfg.mu = get(spec, "mu", 0.0);
    else if (spec.contains("original_power"))
      cfg.mu = mu_from_original_power(get(spec, "original_power", 0.8), alpha);
    else
      throw UsageError("alternative truth needs 'mu' or 'original_power'");
    if (!cfg.c) cfg.c = 1.0;
  }

  const std::vector<SimResult> results = methods.size() == 1
                                             ? std::vector<SimResult>{[&] {
                                                 cfg.method = methods.front();
                                                 return simulate(cfg);
                                               }()}
                                             : simulate_methods(cfg, methods);
  Json rows = Json::array();
  for (std::size_t i = 0; i < methods.size(); ++i)
    rows.push_back({{"method", name(methods[i])},
                    {"truth", truth_name(cfg.truth)},
                    {"rate", results[i].rate},
                    {"se", results[i].se},
                    {"successes", results[i].successes},
                    {"n_sim", results[i].n_sim},
                    {"seed", seed}});
  return single_or_array(std::move(rows));
}

// ---------------------------------------------------------------------------
// Driver

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(*path);
  } catch (const CLI::Error& e) {
    throw UsageError("cannot read config file " + *path + ": " + e.what());
  }
  std::vector<std::string> extra;
  for (const auto& item : items) {
    const std::string& key = item.name;
    if (key.empty() || key == "++" || key == "--" || key == "config") continue;
    const std::string flag = "--" + key;
    if (flag_given(args, flag)) continue;
    if (item.inputs.size() == 1 && item.inputs.front() == "false") continue;
    extra.push_back(flag);
    if (item.inputs.size() == 1 && item.inputs.front() == "true") continue;
    extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return 0;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Assess replication success by combining original and replication p-values",
               "replisum"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output = "text";
  std::string config;
  app.add_option("--output", output, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--config", config, "key=value file of default flag values; flags win");

  CombineOptions combine;
  auto* combine_cmd = app.add_subcommand("combine", "combined p-value and success verdict");
  combine_cmd->add_option("--po", combine.po, "original one-sided p-value")->required();
  combine_cmd->add_option("--pr", combine.pr, "replication one-sided p-value")->required();
  add_method_options(combine_cmd, combine.m, true);

  LevelOptions level;
  auto* level_cmd = app.add_subcommand("level", "conditional significance level for the replication");
  level_cmd->add_option("--po", level.po, "original one-sided p-value")->required();
  add_method_options(level_cmd, level.m, true);

  PowerOptions power;
  auto* power_cmd = app.add_subcommand("power", "project power of a replication project");
  power_cmd->add_option("--original-power", power.original_power, "power of the original study")
      ->capture_default_str();
  power_cmd->add_option("--c", power.c, "relative sample size n_r / n_o")->capture_default_str();
  power_cmd->add_option("--d", power.d, "effect ratio theta_r / theta_o")->capture_default_str();
  power_cmd->add_option("--curve", power.curve, "cmin cmax steps: evaluate on a linear c grid")
      ->expected(3);
  add_method_options(power_cmd, power.m, false);

  SampleSizeOptions ss;
  auto* ss_cmd = app.add_subcommand("samplesize", "replication sample size");
  ss_cmd->add_option("--po", ss.po, "original one-sided p-value");
  ss_cmd->add_option("--power", ss.power, "target power")->capture_default_str();
  ss_cmd->add_flag("--predictive", ss.predictive, "size for predictive instead of conditional power");
  ss_cmd->add_option("--theta", ss.theta, "original effect estimate");
  ss_cmd->add_option("--tau", ss.tau, "common standard deviation");
  ss_cmd->add_option("--no", ss.no, "original per-group sample size");
  ss_cmd->add_option("--shrinkage", ss.shrinkage, "fractional reduction of the original effect")
      ->capture_default_str();
  ss_cmd->add_option("--ratio-curve", ss.ratio_curve,
                     "pmin pmax steps: sample-size ratio to the two-trials rule on a log po grid")
      ->expected(3);
  add_method_options(ss_cmd, ss.m, false);

  SequentialOptions seq;
  auto* seq_cmd = app.add_subcommand("sequential", "two-stage replication with alpha spending");
  seq_cmd->require_subcommand(1);
  auto* plan_cmd = seq_cmd->add_subcommand("plan", "budgets b2 and b3 for a spending fraction");
  plan_cmd->add_option("--alpha", seq.alpha, "one-sided level per study")->capture_default_str();
  plan_cmd->add_option("--gamma", seq.gamma, "fraction of alpha^2 spent at the first replication")
      ->capture_default_str();
  plan_cmd->add_option("--curve", seq.curve_steps, "steps: evaluate on a gamma grid over [0, 1]");
  auto* decide_cmd = seq_cmd->add_subcommand("decide", "decision after the first replication");
  decide_cmd->add_option("--alpha", seq.alpha, "one-sided level per study")->capture_default_str();
  decide_cmd->add_option("--gamma", seq.gamma, "fraction of alpha^2 spent at the first replication")
      ->capture_default_str();
  decide_cmd->add_option("--e2", seq.e2, "sum po + pr1");
  decide_cmd->add_option("--po", seq.po, "original p-value");
  decide_cmd->add_option("--pr1", seq.pr1, "first replication p-value");
  auto* assess_cmd = seq_cmd->add_subcommand("assess", "Edgington's method with three p-values");
  assess_cmd->add_option("--alpha", seq.alpha, "one-sided level per study")->capture_default_str();
  assess_cmd->add_option("--po", seq.po, "original p-value");
  assess_cmd->add_option("--pr1", seq.pr1, "first replication p-value");
  assess_cmd->add_option("--pr2", seq.pr2, "second replication p-value");

  AnalyzeOptions an;
  auto* an_cmd = app.add_subcommand("analyze", "analyse a replication-project dataset");
  an_cmd->add_option("--input", an.input, "CSV file")->required();
  an_cmd->add_option("--projects", an.projects, "restrict to these projects");
  an_cmd->add_option("--output-dir", an.output_dir, "write all tables (CSV and JSON) here");
  an_cmd->add_option("--table", an.table, "table printed on standard output")
      ->check(CLI::IsMember({"summary", "rates", "success", "combined"}))
      ->capture_default_str();
  an_cmd->add_option("--thresholds", an.thresholds, "po thresholds for replication rates");
  an_cmd->add_option("--alpha-sq", an.alpha_sq, "overall levels for success rates");
  an_cmd->add_option("--alpha", an.alpha, "one-sided level per study")->capture_default_str();
  an_cmd->add_option("--wo", an.wo, "weight of the original study")->capture_default_str();
  an_cmd->add_option("--wr", an.wr, "weight of the replication study")->capture_default_str();
  an_cmd->add_flag("--skip-invalid", an.skip_invalid, "drop invalid rows instead of failing");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check from a JSON spec");
  sim_cmd->add_option("--spec", sim.spec, "JSON simulation spec")->required();
  sim_cmd->add_option("--seed", sim.seed, "seed (default: spec, then REPLISUM_SEED, then 1)");
  sim_cmd->add_option("--nsim", sim.nsim, "number of replicates");
  sim_cmd->add_option("--workers", sim.workers, "threads (0: all cores)");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const Format fmt = output == "json" ? Format::Json : output == "csv" ? Format::Csv : Format::Text;
  return guarded(err, [&] {
    if (*combine_cmd) return emit(out, fmt, run_combine(combine));
    if (*level_cmd) return emit(out, fmt, run_level(level));
    if (*power_cmd) return run_power(power, fmt, out);
    if (*ss_cmd) return run_samplesize(ss, fmt, out);
    if (*plan_cmd) return run_plan(seq, fmt, out);
    if (*decide_cmd) return emit(out, fmt, run_decide(seq));
    if (*assess_cmd) return emit(out, fmt, run_assess_three(seq));
    if (*an_cmd) return run_analyze(an, fmt, out, err);
    if (*sim_cmd) return emit(out, fmt, run_simulate(sim));
  });
}

}  // namespace replisum::cli
