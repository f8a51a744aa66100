#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "replisum/sequential.hpp"
#include "replisum/types.hpp"

namespace replisum {

/// Counter-based uniform stream: draw(i, s) is the SplitMix64 output at
/// position 4*i + s + 1 of the sequence seeded by `seed`, so any replicate
/// can be regenerated in isolation and thread scheduling cannot change it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  std::uint64_t bits(std::uint64_t replicate, unsigned stream) const noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t replicate, unsigned stream) const noexcept;
  /// Standard normal by inversion of uniform().
  double normal(std::uint64_t replicate, unsigned stream) const;

 private:
  std::uint64_t key_;
};

enum class Truth {
  Null,         // po, pr independent U(0, 1)
  Conditional,  // po fixed, pr ~ U(0, 1)
  Alternative,  // zo ~ N(mu, 1), zr ~ N(d mu sqrt(c), 1)
};

struct SimConfig {
  Method method = Method::TwoTrials;
  double alpha = 0.025;
  std::optional<Weights> w;
  std::optional<double> c;  // meta-analysis weight; also the alternative's c
  Truth truth = Truth::Null;
  double po = 0.0;  // Conditional
  double mu = 0.0;  // Alternative
  double d = 1.0;   // Alternative
  /// Alternative only: count success only when zo >= 0 (mirrors the
  /// integration range used for Fisher and meta-analysis project power).
  bool require_positive_zo = false;
  std::int64_t n_sim = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct SimResult {
  double rate;
  double se;  // sqrt(rate (1 - rate) / n_sim)
  std::int64_t successes;
  std::int64_t n_sim;
};

SimResult simulate(const SimConfig& cfg);

/// Evaluates several methods on the same draws (cfg.method is ignored).
std::vector<SimResult> simulate_methods(const SimConfig& cfg, std::span<const Method> methods);

/// Null rejection rate of the two-stage procedure from uniform triples:
/// success iff E2 <= b2, or b2 < E2 < b3 and E3 <= b3.
SimResult simulate_sequential(const SpendingPlan& plan, std::int64_t n_sim, std::uint64_t seed,
                              unsigned workers = 0);

/// Smallest positive p used when mapping simulated z-values to p-values.
inline constexpr double kMinSimP = 1e-300;

}  // namespace replisum
