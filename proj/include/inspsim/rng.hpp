#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "inspsim/domain.hpp"

namespace inspsim {

// splitmix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
  return mix64(mix64(mix64(mix64(seed) ^ a) ^ b) ^ c);
}

// A seeded random stream. Every stochastic draw in a run comes from a stream
// keyed by (seed, replication, item, activity) so that policy variants sharing
// a seed consume identical numbers for identical decisions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  // Lognormal multiplier with the given mean; sigma is the sd of the log.
  double lognormal(double mean, double sigma) {
    if (sigma <= 0.0) return mean;
    return mean * std::exp(sigma * normal() - 0.5 * sigma * sigma);
  }

  double sample(const Distribution& dist) {
    switch (dist.kind) {
      case DistributionKind::Degenerate: return dist.a;
      case DistributionKind::LogNormal: return lognormal(dist.a, dist.b);
      case DistributionKind::Uniform: return dist.a == dist.b ? dist.a : uniform(dist.a, dist.b);
    }
    return dist.a;
  }

  // Binomial draw realized as n Bernoulli trials against one uniform each, so
  // counts are monotone in p under common random numbers.
  int bernoulli_count(int n, double p) {
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += uniform() < p ? 1 : 0;
    return hits;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

enum class StreamTag : std::uint64_t {
  Design = 1,
  CodingFatigue,
  CodingNoise,
  InspectionFatigue,
  Detection,
  Rework,
  Scenario
};

inline RandomStream item_stream(std::uint64_t seed, int replication, std::size_t item_index, StreamTag tag) {
  return RandomStream(derive_seed(seed, static_cast<std::uint64_t>(replication), item_index,
                                  static_cast<std::uint64_t>(tag)));
}

}  // namespace inspsim
