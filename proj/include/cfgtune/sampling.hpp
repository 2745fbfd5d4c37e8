#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cfgtune/errors.hpp"
#include "cfgtune/param_space.hpp"
#include "cfgtune/rng.hpp"

namespace cfgtune {

struct LhsDesign {
  std::vector<NormalizedConfig> samples;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
};

/// Index of the stratum of width 1/n containing u; u == 1 belongs to the last one.
inline std::size_t stratum_of(double u, std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
  return std::min(k, n - 1);
}

/// One random Latin hypercube design drawn from `rng`.
///
/// Every column is an independent random permutation of the n strata and
/// each coordinate is uniform within its stratum.
inline std::vector<NormalizedConfig> generate_lhs(std::size_t n, std::size_t d, Rng& rng) {
  if (n < 1 || d < 1) throw ContractViolation("generate_lhs: n and d must be at least 1");
  std::vector<NormalizedConfig> samples(n, NormalizedConfig{std::vector<double>(d)});
  std::vector<std::size_t> perm(n);
  const double width = static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = perm[i];
      double u = (static_cast<double>(k) + rng.uniform01()) / width;
      // (k + U) / n can round up onto the next stratum boundary.
      while (stratum_of(u, n) > k) u = std::nextafter(u, 0.0);
      samples[i][j] = u;
    }
  }
  return samples;
}

inline LhsDesign generate_lhs(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return LhsDesign{generate_lhs(n, d, rng), seed, 1};
}

/// Smallest Euclidean distance between any two samples.
inline double min_pairwise_distance(const std::vector<NormalizedConfig>& samples) {
  if (samples.size() < 2) throw ContractViolation("min_pairwise_distance: need at least two samples");
  double best = INFINITY;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      double sq = 0.0;
      for (std::size_t j = 0; j < samples[a].size(); ++j) {
        const double diff = samples[a][j] - samples[b][j];
        sq += diff * diff;
      }
      best = std::min(best, sq);
    }
  }
  return std::sqrt(best);
}

inline double min_pairwise_distance(const LhsDesign& design) { return min_pairwise_distance(design.samples); }

/// Best of `restarts` consecutive designs from `rng` by min_pairwise_distance;
/// ties keep the earliest candidate.
inline std::vector<NormalizedConfig> maximin_lhs(std::size_t n, std::size_t d, std::size_t restarts, Rng& rng) {
  if (n < 2) throw ContractViolation("maximin_lhs: n must be at least 2");
  if (restarts < 1) throw ContractViolation("maximin_lhs: restarts must be at least 1");
  std::vector<NormalizedConfig> best = generate_lhs(n, d, rng);
  double best_distance = min_pairwise_distance(best);
  for (std::size_t r = 1; r < restarts; ++r) {
    auto candidate = generate_lhs(n, d, rng);
    const double distance = min_pairwise_distance(candidate);
    if (distance > best_distance) {
      best = std::move(candidate);
      best_distance = distance;
    }
  }
  return best;
}

inline LhsDesign maximin_lhs(std::size_t n, std::size_t d, std::size_t restarts, std::uint64_t seed) {
  Rng rng(seed);
  return LhsDesign{maximin_lhs(n, d, restarts, rng), seed, restarts};
}

}  // namespace cfgtune
