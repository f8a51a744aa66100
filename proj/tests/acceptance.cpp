// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "replisum/combine.hpp"
#include "replisum/conditional.hpp"
#include "replisum/design.hpp"
#include "replisum/power.hpp"
#include "replisum/projects.hpp"
#include "replisum/sequential.hpp"
#include "replisum/sim.hpp"
#include "replisum/specfun.hpp"

using namespace replisum;

namespace {

// Pinned tolerances and seeds.
constexpr double kAlpha = 0.025;
constexpr double kAlphaSq = kAlpha * kAlpha;
constexpr double kBudgetTol = 1e-6;
constexpr double kBudget3Tol = 1e-4;
constexpr double kLimitTolPoints = 0.3;
constexpr double kLimitQuadTol = 1e-3;
constexpr double kSeSigma = 3.0;
constexpr std::int64_t kBatteryN = 1'000'000;
constexpr std::int64_t kNullN = 10'000'000;
constexpr double kConditionalTolPoints = 0.2;
constexpr double kCrossoverTol = 1e-4;
constexpr double kPredictiveTolPoints = 0.3;
constexpr double kLocationFactor = 2.0;
constexpr double kPlanTol = 0.005;
constexpr double kMinPeTol = 1e-5;
constexpr int kValidityN = 1'000'000;
constexpr double kKsCritical = 1.95;  // sup-distance bound times sqrt(n), 0.1% level
constexpr std::uint64_t kSeedBattery = 20241015;
constexpr std::uint64_t kSeedNull = 7001;
constexpr std::uint64_t kSeedSequential = 7002;
constexpr std::uint64_t kSeedPlan = 7003;
constexpr std::uint64_t kSeedValidity = 7004;

enum class Status { Pass, Fail, Skip };

class Criterion {
 public:
  explicit Criterion(std::string title) : title_(std::move(title)) {}

  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ok_ = false;
      failures_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }
  void skip(const std::string& why) {
    skipped_ = true;
    notes_ = {why};
  }

  Status report(int id) const {
    const Status st = skipped_ ? Status::Skip : ok_ ? Status::Pass : Status::Fail;
    const char* tag = st == Status::Pass ? "PASS" : st == Status::Fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << std::setw(2) << id << "  " << title_;
    if (st != Status::Skip) std::cout << " (" << checks_ - failures_.size() << '/' << checks_ << " checks)";
    const auto& lines = st == Status::Fail ? failures_ : notes_;
    for (std::size_t i = 0; i < lines.size(); ++i) std::cout << (i ? "; " : " | ") << lines[i];
    std::cout << std::endl;
    return st;
  }

 private:
  std::string title_;
  bool ok_ = true;
  bool skipped_ = false;
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

double round_to(double v, int decimals) {
  const double f = std::pow(10.0, decimals);
  return std::round(v * f) / f;
}

bool within_se(double estimate, double target, std::int64_t n) {
  return std::abs(estimate - target) <= kSeSigma * std::sqrt(target * (1 - target) / n);
}

// ---------------------------------------------------------------------------

Criterion worked_examples() {
  Criterion c("worked examples");
  const StudyPair a{0.026, 0.001, std::nullopt};
  const StudyPair b{0.024, 0.024, std::nullopt};
  const double pa = p_edgington(a);
  const double pb = p_edgington(b);
  c.expect(round_to(pa, 4) == 0.0004, "pE(0.026, 0.001) = " + fmt(pa) + " does not round to 0.0004");
  c.expect(round_to(pb, 3) == 0.001, "pE(0.024, 0.024) = " + fmt(pb) + " does not round to 0.001");
  c.expect(assess(a, Method::Edgington, kAlpha).success, "Edgington should succeed for (0.026, 0.001)");
  c.expect(!assess(b, Method::Edgington, kAlpha).success, "Edgington should fail for (0.024, 0.024)");
  c.expect(!assess(a, Method::TwoTrials, kAlpha).success, "two-trials should fail for (0.026, 0.001)");
  c.expect(assess(b, Method::TwoTrials, kAlpha).success, "two-trials should succeed for (0.024, 0.024)");
  c.note("pE = " + fmt(pa, 4) + ", " + fmt(pb, 4));
  return c;
}

Criterion budgets() {
  Criterion c("budgets");
  const double b = budget(kAlpha);
  const double bw = budget_weighted(kAlpha, Weights(1, 2));
  const double b3 = budget_k(kAlpha, 3);
  c.expect(std::abs(b - 0.035355) <= kBudgetTol, "budget = " + fmt(b, 8));
  c.expect(bw == 0.05, "weighted budget = " + fmt(bw, 17));
  c.expect(std::abs(b3 - 0.15536) <= kBudget3Tol, "budget_k(3) = " + fmt(b3, 8));
  c.note("b = " + fmt(b) + ", b_w = " + fmt(bw) + ", b_3 = " + fmt(b3));
  return c;
}

Criterion conditional_table() {
  Criterion c("conditional Type-I error table");
  struct Row {
    double po;
    Method m;
    double printed_pct;
    int decimals;
  };
  const Row rows[] = {
      {0.001, Method::Edgington, 3.4, 1},          {0.001, Method::EdgingtonWeighted, 2.45, 2},
      {0.001, Method::Fisher, 5.8, 1},             {0.001, Method::MetaAnalysis, 7.0, 1},
      {0.0001, Method::Edgington, 3.53, 2},        {0.0001, Method::EdgingtonWeighted, 2.495, 3},
      {0.0001, Method::Fisher, 58.1, 1},           {0.0001, Method::MetaAnalysis, 19.9, 1},
  };
  std::string got;
  for (const Row& r : rows) {
    const double pct = 100.0 * conditional_level(r.m, r.po, kAlpha, Weights(1, 2), 1.0).level;
    const double shown = round_to(pct, r.decimals);
    c.expect(std::abs(shown - r.printed_pct) < 1e-9,
             std::string(to_string(r.m)) + " at po=" + fmt(r.po) + ": " + fmt(pct) + "% vs " +
                 fmt(r.printed_pct) + "%");
    got += (got.empty() ? "" : ", ") + fmt(shown, 4);
  }
  c.note(got);
  return c;
}

Criterion fisher_crit() {
  Criterion c("Fisher critical value");
  const double cf = fisher_critical(kAlpha);
  c.expect(cf >= 5.7e-5 && cf <= 5.9e-5, "c_F = " + fmt(cf));
  c.note("c_F = " + fmt(cf));
  return c;
}

Criterion power_limits() {
  Criterion c("project-power limits");
  const Weights w(1, 2);
  struct Row {
    double power;
    bool weighted;
    double printed_pct;
  };
  const Row rows[] = {{0.8, false, 84.0}, {0.8, true, 87.6}, {0.4, false, 46.0}, {0.4, true, 52.5}};
  std::string got;
  for (const Row& r : rows) {
    const std::optional<Weights> ww = r.weighted ? std::optional<Weights>(w) : std::nullopt;
    const double lim = limit_power_edgington(r.power, kAlpha, ww);
    c.expect(std::abs(100 * lim - r.printed_pct) <= kLimitTolPoints,
             "limit " + fmt(100 * lim) + "% vs " + fmt(r.printed_pct) + "%");
    PowerScenario s;
    s.original_power = r.power;
    s.c = 1e3;
    s.w = ww;
    const double q = r.weighted ? project_power_edgington_weighted(s) : project_power_edgington(s);
    c.expect(std::abs(q - lim) <= kLimitQuadTol, "quadrature at c=1e3 " + fmt(q) + " vs " + fmt(lim));
    got += (got.empty() ? "" : ", ") + fmt(100 * lim, 4) + "%";
  }
  c.note(got);
  return c;
}

Criterion quadrature_vs_mc() {
  Criterion c("quadrature vs Monte Carlo battery");
  const double powers[] = {0.4, 0.8};
  const double cs[] = {0.5, 1.0, 2.0, 4.0, 6.0, 10.0};
  const double ds[] = {1.0, 0.5};
  int scenarios = 0;
  double worst = 0.0;
  for (double pw : powers)
    for (double cc : cs)
      for (double d : ds) {
        ++scenarios;
        SimConfig cfg;
        cfg.truth = Truth::Alternative;
        cfg.mu = mu_from_original_power(pw, kAlpha);
        cfg.c = cc;
        cfg.d = d;
        cfg.require_positive_zo = true;
        cfg.n_sim = kBatteryN;
        cfg.seed = kSeedBattery + static_cast<std::uint64_t>(scenarios);
        const auto mc = simulate_methods(cfg, kAllMethods);
        PowerScenario s;
        s.original_power = pw;
        s.c = cc;
        s.d = d;
        for (std::size_t i = 0; i < std::size(kAllMethods); ++i) {
          const double q = project_power(kAllMethods[i], s);
          const double se = std::sqrt(std::max(q * (1 - q), 1e-12) / kBatteryN);
          worst = std::max(worst, std::abs(mc[i].rate - q) / se);
          c.expect(within_se(mc[i].rate, q, kBatteryN),
                   std::string(to_string(kAllMethods[i])) + " power=" + fmt(pw) + " c=" + fmt(cc) +
                       " d=" + fmt(d) + ": quad " + fmt(q) + " vs MC " + fmt(mc[i].rate));
        }
      }
  c.note(std::to_string(scenarios) + " scenarios x 5 methods, max |z| = " + fmt(worst, 3));

  // Informational: without the zo >= 0 restriction Fisher and meta-analysis gain a little.
  SimConfig open;
  open.truth = Truth::Alternative;
  open.mu = mu_from_original_power(0.8, kAlpha);
  open.c = 1.0;
  open.n_sim = kBatteryN;
  open.seed = kSeedBattery;
  const Method fm[] = {Method::Fisher, Method::MetaAnalysis};
  const auto unrestricted = simulate_methods(open, fm);
  c.note("unrestricted MC at power 0.8, c=1: fisher " + fmt(unrestricted[0].rate, 4) + ", meta " +
         fmt(unrestricted[1].rate, 4));
  return c;
}

Criterion overall_type1() {
  Criterion c("overall Type-I error control");
  SimConfig cfg;
  cfg.truth = Truth::Null;
  cfg.c = 1.0;
  cfg.n_sim = kNullN;
  cfg.seed = kSeedNull;
  const auto rates = simulate_methods(cfg, kAllMethods);
  std::string got;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    c.expect(within_se(rates[i].rate, kAlphaSq, kNullN),
             std::string(to_string(kAllMethods[i])) + " null rate " + fmt(rates[i].rate));
    got += (got.empty() ? "" : ", ") + fmt(rates[i].rate, 4);
  }
  std::uint64_t seed = kSeedSequential;
  for (double gamma : {0.0, 0.5, 1.0}) {
    const SimResult r = simulate_sequential(spending_plan(kAlpha, gamma), kNullN, seed++);
    c.expect(within_se(r.rate, kAlphaSq, kNullN),
             "sequential gamma=" + fmt(gamma) + " null rate " + fmt(r.rate));
    got += ", seq(" + fmt(gamma) + ") " + fmt(r.rate, 4);
  }
  c.note(got);
  return c;
}

Criterion sample_size_ratios() {
  Criterion c("sample-size ratios");
  const double r80 = sample_size_ratio_conditional(1e-12, kAlpha, 0.8, Method::Edgington);
  const double r90 = sample_size_ratio_conditional(1e-12, kAlpha, 0.9, Method::Edgington);
  c.expect(std::abs(100 * (1 - r80) - 10.6) <= kConditionalTolPoints,
           "conditional reduction 80%: " + fmt(100 * (1 - r80)));
  c.expect(std::abs(100 * (1 - r90) - 9.2) <= kConditionalTolPoints,
           "conditional reduction 90%: " + fmt(100 * (1 - r90)));

  double lo = 1e-6;
  double hi = 0.02;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sample_size_ratio_conditional(mid, kAlpha, 0.8, Method::Edgington) < 1.0 ? lo : hi) = mid;
  }
  const double crossover = 0.5 * (lo + hi);
  const double expected = kAlpha * (std::sqrt(2.0) - 1.0);
  c.expect(std::abs(crossover - expected) <= kCrossoverTol,
           "crossover " + fmt(crossover) + " vs " + fmt(expected));

  const auto grid = log_grid(1e-6, 0.02, 2000);
  std::string got;
  for (auto [power, where, pct] : {std::tuple{0.8, 9e-5, 11.2}, std::tuple{0.9, 2e-4, 10.3}}) {
    double best = INFINITY;
    double arg = 0.0;
    for (double po : grid) {
      const double r = sample_size_ratio_predictive(po, kAlpha, power, Method::Edgington);
      if (r < best) {
        best = r;
        arg = po;
      }
    }
    c.expect(std::abs(100 * (1 - best) - pct) <= kPredictiveTolPoints,
             "predictive reduction " + fmt(100 * (1 - best)) + " vs " + fmt(pct));
    c.expect(arg >= where / kLocationFactor && arg <= where * kLocationFactor,
             "predictive minimum at po=" + fmt(arg) + ", expected near " + fmt(where));
    got += ", predictive " + fmt(100 * (1 - best), 3) + "% at " + fmt(arg, 3);
  }
  c.note("conditional " + fmt(100 * (1 - r80), 3) + "%/" + fmt(100 * (1 - r90), 3) +
         "%, crossover " + fmt(crossover, 5) + got);
  return c;
}

Criterion spending() {
  Criterion c("spending plan");
  const SpendingPlan p = spending_plan(kAlpha, 0.5);
  c.expect(p.b2 == 0.025, "b2 = " + fmt(p.b2, 17));
  c.expect(std::abs(p.b3 - 0.13) <= kPlanTol, "b3 = " + fmt(p.b3));
  const SimResult r = simulate_sequential(p, kNullN, kSeedPlan);
  c.expect(within_se(r.rate, kAlphaSq, kNullN), "two-stage MC rate " + fmt(r.rate));
  c.note("b2 = " + fmt(p.b2) + ", b3 = " + fmt(p.b3) + ", MC rate " + fmt(r.rate, 4));
  return c;
}

Criterion dataset() {
  Criterion c("dataset analyses");
  std::string path;
  if (const char* env = std::getenv("REPLISUM_DATASET"); env && *env) path = env;
  else path = std::string(REPLISUM_TEST_DATA) + "/rprojects.csv";
  if (!std::filesystem::exists(path)) {
    c.skip("dataset not found at " + path +
           " (set REPLISUM_DATASET to the 138-pair CSV with columns project,study,ro,no,rr,nr)");
    return c;
  }
  std::ifstream in(path);
  const IngestResult res = ingest_csv(in);
  c.expect(res.errors.empty(), std::to_string(res.errors.size()) + " invalid rows");
  const auto pairs = to_labeled_pairs(res.records);
  c.expect(pairs.size() == 138, std::to_string(pairs.size()) + " pairs instead of 138");

  const double grid[] = {kAlphaSq};
  const Method two[] = {Method::TwoTrials, Method::Edgington};
  const auto rates = success_rates(pairs, two, grid);
  struct Expect {
    const char* project;
    double two_trials;
    double edgington;
  };
  const Expect expected[] = {
      {"RPP", 30.4, 31.9}, {"EERP", 55.6, 61.1}, {"SSRP", 61.9, 61.9}, {"EPRP", 76.7, 76.7}};
  for (const Expect& e : expected) {
    for (const auto& r : rates) {
      if (r.project != e.project) continue;
      const double want = r.method == Method::TwoTrials ? e.two_trials : e.edgington;
      const double got = r.rate ? round_to(100 * *r.rate, 1) : -1;
      c.expect(std::abs(got - want) < 1e-9, std::string(e.project) + " " +
                                                std::string(to_string(r.method)) + " " + fmt(got) +
                                                "% vs " + fmt(want) + "%");
    }
    c.expect(std::any_of(rates.begin(), rates.end(),
                         [&](const SuccessRate& r) { return r.project == e.project; }),
             std::string("project ") + e.project + " missing");
  }
  const AnalysisSummary s = summarize(pairs, kAlpha);
  c.expect(s.n_discordant == 2, std::to_string(s.n_discordant) + " discordant pairs");
  c.expect(s.n_po_below_1e6 == 17, std::to_string(s.n_po_below_1e6) + " pairs with po < 1e-6");
  c.expect(s.min_pe_nonsignificant && std::abs(*s.min_pe_nonsignificant - 0.000635) <= kMinPeTol,
           "min pE among pr > 0.025 = " + fmt(s.min_pe_nonsignificant.value_or(NAN)));
  c.expect(s.fisher_successes_wrong_direction == 3,
           std::to_string(s.fisher_successes_wrong_direction) + " Fisher successes with pr > 0.5");
  c.expect(s.meta_successes_wrong_direction == 1,
           std::to_string(s.meta_successes_wrong_direction) + " meta successes with pr > 0.5");
  return c;
}

Criterion properties() {
  Criterion c("property suites");

  // Validity: combined p is uniform under the null (sup distance on a grid).
  std::mt19937_64 gen(kSeedValidity);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Weights w(1, 2);
  std::vector<std::vector<double>> ps(std::size(kAllMethods));
  for (int i = 0; i < kValidityN; ++i) {
    double po = u(gen);
    double pr = u(gen);
    if (po <= 0.0 || pr <= 0.0) continue;
    const StudyPair pair{po, pr, 1.0};
    for (std::size_t m = 0; m < std::size(kAllMethods); ++m)
      ps[m].push_back(combined_p(pair, kAllMethods[m], w));
  }
  double worst_ks = 0.0;
  for (std::size_t m = 0; m < ps.size(); ++m) {
    auto& v = ps[m];
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      d = std::max({d, std::abs(v[i] - i / n), std::abs(v[i] - (i + 1) / n)});
    worst_ks = std::max(worst_ks, d * std::sqrt(n));
    c.expect(d * std::sqrt(n) <= kKsCritical,
             std::string(to_string(kAllMethods[m])) + " KS " + fmt(d * std::sqrt(n), 3));
  }

  // Monotonicity in each argument on a 200 x 200 grid.
  int monotone_violations = 0;
  for (Method m : kAllMethods)
    for (int i = 1; i <= 200; ++i)
      for (int j = 1; j <= 200; ++j) {
        const double po = i / 201.0;
        const double pr = j / 201.0;
        const double here = combined_p({po, pr, 1.0}, m, w);
        if (i < 200 && combined_p({(i + 1) / 201.0, pr, 1.0}, m, w) < here) ++monotone_violations;
        if (j < 200 && combined_p({po, (j + 1) / 201.0, 1.0}, m, w) < here) ++monotone_violations;
      }
  c.expect(monotone_violations == 0, std::to_string(monotone_violations) + " monotonicity violations");

  // Weight-ratio invariance and distribution reductions.
  double max_ratio_dev = 0.0;
  double max_reduction_dev = 0.0;
  for (int i = 1; i < 100; ++i)
    for (int j = 1; j < 100; ++j) {
      const StudyPair pair{i / 100.0, j / 100.0, std::nullopt};
      const double base = p_edgington_weighted(pair, Weights(1, 2));
      max_ratio_dev = std::max({max_ratio_dev,
                                std::abs(p_edgington_weighted(pair, Weights(2, 4)) - base),
                                std::abs(p_edgington_weighted(pair, Weights(0.5, 1)) - base)});
      max_reduction_dev =
          std::max(max_reduction_dev, std::abs(p_edgington_weighted(pair, Weights(1, 1)) -
                                               p_edgington(pair)));
    }
  for (int i = 0; i <= 400; ++i) {
    const double x = i / 100.0;
    max_reduction_dev = std::max({max_reduction_dev,
                                  std::abs(trapezoid_cdf(x, 1, 1) - irwin_hall_cdf(x, 2)),
                                  std::abs(trapezoid_cdf(x, 2, 2) - irwin_hall_cdf(x / 2, 2)),
                                  std::abs(irwin_hall_cdf(x / 4, 1) - std::min(x / 4, 1.0))});
  }
  c.expect(max_ratio_dev <= 1e-12, "weight-ratio deviation " + fmt(max_ratio_dev));
  c.expect(max_reduction_dev <= 1e-12, "reduction deviation " + fmt(max_reduction_dev));
  c.note("max KS*sqrt(n) " + fmt(worst_ks, 3) + ", monotone grid clean, invariance dev " +
         fmt(max_ratio_dev, 2) + ", reduction dev " + fmt(max_reduction_dev, 2));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Criterion()>> criteria{
      worked_examples, budgets,          conditional_table, fisher_crit, power_limits,
      quadrature_vs_mc, overall_type1,   sample_size_ratios, spending,   dataset,
      properties};
  int failed = 0;
  int skipped = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Status st = Status::Fail;
    try {
      st = criteria[i]().report(static_cast<int>(i + 1));
    } catch (const std::exception& e) {
      std::cout << "FAIL  " << std::setw(2) << i + 1 << "  exception: " << e.what() << std::endl;
    }
    failed += st == Status::Fail;
    skipped += st == Status::Skip;
  }
  std::cout << criteria.size() - failed - skipped << " passed, " << failed << " failed, " << skipped
            << " skipped" << std::endl;
  return failed == 0 ? 0 : 1;
}
