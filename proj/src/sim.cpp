#include "replisum/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "replisum/combine.hpp"
#include "replisum/error.hpp"
#include "replisum/specfun.hpp"

namespace replisum {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double to_p(double z) { return std::clamp(norm_sf(z), kMinSimP, 1.0 - 0x1p-53); }

SimResult make_result(std::int64_t successes, std::int64_t n) {
  const double rate = static_cast<double>(successes) / static_cast<double>(n);
  return SimResult{rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(n)), successes, n};
}

// Runs body(first, last, counts) over contiguous replicate blocks and sums the
// per-worker integer counts, so the total does not depend on the split.
std::vector<std::int64_t> parallel_count(
    std::int64_t n, std::size_t n_counts, unsigned workers,
    const std::function<void(std::int64_t, std::int64_t, std::vector<std::int64_t>&)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(n, 1)));
  std::vector<std::vector<std::int64_t>> partial(workers, std::vector<std::int64_t>(n_counts, 0));
  std::vector<std::thread> threads;
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::int64_t first = std::min<std::int64_t>(n, t * chunk);
    const std::int64_t last = std::min<std::int64_t>(n, first + chunk);
    if (t + 1 == workers) {
      body(first, last, partial[t]);
    } else {
      threads.emplace_back([&, first, last, t] { body(first, last, partial[t]); });
    }
  }
  for (auto& th : threads) th.join();
  std::vector<std::int64_t> total(n_counts, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < n_counts; ++i) total[i] += p[i];
  return total;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(splitmix(seed + kGolden)) {}

std::uint64_t CounterRng::bits(std::uint64_t replicate, unsigned stream) const noexcept {
  return splitmix(key_ + (4 * replicate + stream + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t replicate, unsigned stream) const noexcept {
  return (static_cast<double>(bits(replicate, stream) >> 11) + 0.5) * 0x1p-53;
}

double CounterRng::normal(std::uint64_t replicate, unsigned stream) const {
  return norm_quantile(uniform(replicate, stream));
}

std::vector<SimResult> simulate_methods(const SimConfig& cfg, std::span<const Method> methods) {
  if (cfg.n_sim < 1) throw DomainError("n_sim must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (cfg.truth == Truth::Conditional && !(cfg.po > 0.0 && cfg.po < 1.0))
    throw DomainError("conditional truth needs po in (0, 1)");
  if (cfg.truth == Truth::Alternative && !cfg.c)
    throw UsageError("alternative truth needs the relative sample size c");
  for (Method m : methods)
    if (m == Method::MetaAnalysis && !cfg.c) throw UsageError("meta-analysis needs c");

  const CounterRng rng(cfg.seed);
  const double level = cfg.alpha * cfg.alpha;
  const double shift = cfg.truth == Truth::Alternative ? cfg.d * cfg.mu * std::sqrt(*cfg.c) : 0.0;

  const auto body = [&](std::int64_t first, std::int64_t last, std::vector<std::int64_t>& counts) {
    for (std::int64_t i = first; i < last; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      StudyPair pair{0.5, 0.5, cfg.c};
      bool zo_positive = true;
      switch (cfg.truth) {
        case Truth::Null:
          pair.po = rng.uniform(idx, 0);
          pair.pr = rng.uniform(idx, 1);
          break;
        case Truth::Conditional:
          pair.po = cfg.po;
          pair.pr = rng.uniform(idx, 1);
          break;
        case Truth::Alternative: {
          const double zo = cfg.mu + rng.normal(idx, 0);
          const double zr = shift + rng.normal(idx, 1);
          zo_positive = zo >= 0.0;
          pair.po = to_p(zo);
          pair.pr = to_p(zr);
          break;
        }
      }
      if (cfg.require_positive_zo && !zo_positive) continue;
      for (std::size_t k = 0; k < methods.size(); ++k)
        if (combined_p(pair, methods[k], cfg.w) <= level) ++counts[k];
    }
  };

  const auto counts = parallel_count(cfg.n_sim, methods.size(), cfg.workers, body);
  std::vector<SimResult> results;
  results.reserve(methods.size());
  for (std::int64_t k : counts) results.push_back(make_result(k, cfg.n_sim));
  return results;
}

SimResult simulate(const SimConfig& cfg) {
  const Method m[] = {cfg.method};
  return simulate_methods(cfg, m).front();
}

SimResult simulate_sequential(const SpendingPlan& plan, std::int64_t n_sim, std::uint64_t seed,
                              unsigned workers) {
  if (n_sim < 1) throw DomainError("n_sim must be >= 1");
  const CounterRng rng(seed);
  const auto body = [&](std::int64_t first, std::int64_t last, std::vector<std::int64_t>& counts) {
    for (std::int64_t i = first; i < last; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      const double e2 = rng.uniform(idx, 0) + rng.uniform(idx, 1);
      if (e2 <= plan.b2) {
        ++counts[0];
      } else if (e2 < plan.b3 && e2 + rng.uniform(idx, 2) <= plan.b3) {
        ++counts[0];
      }
    }
  };
  return make_result(parallel_count(n_sim, 1, workers, body)[0], n_sim);
}

}  // namespace replisum
