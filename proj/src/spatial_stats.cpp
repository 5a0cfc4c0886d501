#include "accesskit/spatial_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "accesskit/error.hpp"
#include "accesskit/parallel.hpp"
#include "accesskit/travel.hpp"

namespace accesskit {

namespace {

constexpr std::uint32_t kMoranStream = 1;
constexpr std::uint32_t kLisaStream = 2;

// Independent generator for (seed, stream tag, index). Both std::seed_seq and
// mt19937_64 are fully specified, so streams do not depend on scheduling.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint32_t tag, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

struct Centered {
  std::vector<double> z;
  double sum_sq = 0.0;
};

Centered center(std::span<const double> values, const SpatialWeights& weights) {
  if (values.size() != weights.n) {
    throw Error("spatial_stats", "DimensionMismatch",
                std::to_string(values.size()) + " values for " + std::to_string(weights.n) +
                    " spatial units");
  }
  if (weights.n < 2) throw Error("spatial_stats", "TooFewUnits", "need at least 2 units");
  if (!weights.row_standardized) {
    throw Error("spatial_stats", "NotRowStandardized",
                "statistics require row-standardized weights");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("spatial_stats", "NonFiniteValue", "attribute is not finite");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    throw Error("spatial_stats", "ZeroVariance", "attribute is constant; Moran's I is undefined");
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  Centered c;
  c.z.reserve(values.size());
  for (double v : values) {
    c.z.push_back(v - mean);
    c.sum_sq += c.z.back() * c.z.back();
  }
  return c;
}

double spatial_lag(const std::vector<Neighbor>& row, std::span<const double> z) {
  double lag = 0.0;
  for (const auto& nb : row) lag += nb.weight * z[nb.index];
  return lag;
}

double cross_product(const SpatialWeights& w, std::span<const double> z) {
  double total = 0.0;
  for (std::size_t i = 0; i < w.n; ++i) total += z[i] * spatial_lag(w.neighbors[i], z);
  return total;
}

}  // namespace

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::HH: return "HH";
    case Quadrant::LL: return "LL";
    case Quadrant::HL: return "HL";
    case Quadrant::LH: return "LH";
  }
  return "?";
}

SpatialWeights row_standardize(SpatialWeights weights) {
  for (auto& row : weights.neighbors) {
    double sum = 0.0;
    for (const auto& nb : row) sum += nb.weight;
    if (sum > 0.0) {
      for (auto& nb : row) nb.weight /= sum;
    }
  }
  weights.row_standardized = true;
  return weights;
}

SpatialWeights weights_from_neighbors(const std::vector<std::vector<std::size_t>>& lists,
                                      bool standardize) {
  SpatialWeights w;
  w.n = lists.size();
  w.neighbors.resize(w.n);
  for (std::size_t i = 0; i < w.n; ++i) {
    auto ids = lists[i];
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error("spatial_stats", "InvalidWeights",
                  "unit " + std::to_string(i) + " lists a neighbor twice");
    }
    for (std::size_t j : ids) {
      if (j == i) {
        throw Error("spatial_stats", "InvalidWeights",
                    "unit " + std::to_string(i) + " lists itself as a neighbor");
      }
      if (j >= w.n) {
        throw Error("spatial_stats", "InvalidWeights",
                    "unit " + std::to_string(i) + " has out-of-range neighbor " + std::to_string(j));
      }
      w.neighbors[i].push_back({j, 1.0});
    }
    if (ids.empty()) w.isolated.push_back(i);
  }
  return standardize ? row_standardize(std::move(w)) : w;
}

SpatialWeights build_weights(std::span<const Coordinate> locations, CoordinateKind kind,
                             WeightsScheme scheme, bool standardize) {
  const std::size_t n = locations.size();
  if (n < 2) throw Error("spatial_stats", "TooFewUnits", "need at least 2 locations");
  if (scheme.kind == WeightsScheme::Kind::Knn) {
    if (scheme.k == 0) throw Error("spatial_stats", "InvalidScheme", "k must be >= 1");
    if (scheme.k >= n) {
      throw Error("spatial_stats", "KTooLarge",
                  "k = " + std::to_string(scheme.k) + " needs more than " + std::to_string(n) +
                      " units");
    }
  } else if (!(scheme.radius_km > 0.0)) {
    throw Error("spatial_stats", "InvalidScheme", "distance band radius must be > 0");
  }

  std::vector<std::vector<std::size_t>> lists(n);
  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) candidates.emplace_back(distance_km(kind, locations[i], locations[j]), j);
    }
    if (scheme.kind == WeightsScheme::Kind::Knn) {
      // (distance, index) ordering breaks ties toward the smaller index
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(scheme.k),
                        candidates.end());
      for (std::size_t m = 0; m < scheme.k; ++m) lists[i].push_back(candidates[m].second);
    } else {
      for (const auto& [d, j] : candidates) {
        if (d <= scheme.radius_km) lists[i].push_back(j);
      }
    }
  }
  return weights_from_neighbors(lists, standardize);
}

MoranResult morans_i(std::span<const double> values, const SpatialWeights& weights,
                     const PermutationOptions& options) {
  const Centered c = center(values, weights);
  const std::size_t n = weights.n;

  MoranResult result;
  result.i = cross_product(weights, c.z) / c.sum_sq;
  result.expected_i = -1.0 / static_cast<double>(n - 1);
  result.n_permutations = options.n_permutations;
  result.seed = options.seed;

  const std::size_t perms = options.n_permutations;
  std::vector<double> permuted_i(perms);
  parallel_for(perms, options.threads, [&](std::size_t p) {
    auto rng = derived_rng(options.seed, kMoranStream, p);
    std::vector<double> z = c.z;
    std::shuffle(z.begin(), z.end(), rng);
    permuted_i[p] = cross_product(weights, z) / c.sum_sq;
  });

  const double observed = std::abs(result.i - result.expected_i);
  std::size_t extreme = 0;
  double sum = 0.0;
  for (double v : permuted_i) {
    if (std::abs(v - result.expected_i) >= observed) ++extreme;
    sum += v;
  }
  result.p_value = static_cast<double>(extreme + 1) / static_cast<double>(perms + 1);
  result.permutation_mean = perms > 0 ? sum / static_cast<double>(perms) : 0.0;
  double ss = 0.0;
  for (double v : permuted_i) ss += (v - result.permutation_mean) * (v - result.permutation_mean);
  result.permutation_sd = perms > 1 ? std::sqrt(ss / static_cast<double>(perms - 1)) : 0.0;
  result.z_score = result.permutation_sd > 0.0
                       ? (result.i - result.permutation_mean) / result.permutation_sd
                       : std::numeric_limits<double>::quiet_NaN();
  return result;
}

LisaResult lisa(std::span<const double> values, const SpatialWeights& weights,
                const PermutationOptions& options) {
  const Centered c = center(values, weights);
  const std::size_t n = weights.n;
  const double m2 = c.sum_sq / static_cast<double>(n);

  LisaResult result;
  result.n_permutations = options.n_permutations;
  result.seed = options.seed;
  result.units.resize(n);

  parallel_for(n, options.threads, [&](std::size_t i) {
    const auto& row = weights.neighbors[i];
    LisaRecord& rec = result.units[i];
    rec.z = c.z[i];
    rec.lag = spatial_lag(row, c.z);
    rec.local_i = (rec.z / m2) * rec.lag;
    const bool high = rec.z > 0.0;
    const bool high_lag = rec.lag > 0.0;
    rec.quadrant = high ? (high_lag ? Quadrant::HH : Quadrant::HL)
                        : (high_lag ? Quadrant::LH : Quadrant::LL);

    // Conditional expectation of I_i with unit i held fixed.
    double row_sum = 0.0;
    for (const auto& nb : row) row_sum += nb.weight;
    const double expected =
        -(rec.z * rec.z) * row_sum / (static_cast<double>(n - 1) * m2);
    const double observed = std::abs(rec.local_i - expected);

    std::vector<std::size_t> pool;
    pool.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) pool.push_back(j);
    }
    auto rng = derived_rng(options.seed, kLisaStream, i);
    const std::size_t k = row.size();
    std::size_t extreme = 0;
    for (std::size_t p = 0; p < options.n_permutations; ++p) {
      double lag = 0.0;
      // partial Fisher-Yates: the first k slots of pool become the draw
      for (std::size_t m = 0; m < k; ++m) {
        std::uniform_int_distribution<std::size_t> pick(m, pool.size() - 1);
        std::swap(pool[m], pool[pick(rng)]);
        lag += row[m].weight * c.z[pool[m]];
      }
      const double permuted = (rec.z / m2) * lag;
      if (std::abs(permuted - expected) >= observed) ++extreme;
    }
    rec.p_value = static_cast<double>(extreme + 1) /
                  static_cast<double>(options.n_permutations + 1);
  });
  return result;
}

}  // namespace accesskit
