#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "accesskit/data_model.hpp"

namespace accesskit {

struct Neighbor {
  std::size_t index = 0;
  double weight = 0.0;
};

// Sparse spatial weights: neighbors[i] lists the units adjacent to unit i,
// sorted by index, never containing i itself, all weights > 0.
struct SpatialWeights {
  std::size_t n = 0;
  std::vector<std::vector<Neighbor>> neighbors;
  bool row_standardized = false;
  // Units whose neighbor row is empty (distance-band schemes only).
  std::vector<std::size_t> isolated;
};

struct WeightsScheme {
  enum class Kind { Knn, DistanceBand };
  Kind kind = Kind::Knn;
  std::size_t k = 0;
  double radius_km = 0.0;

  static WeightsScheme knn(std::size_t k) { return {Kind::Knn, k, 0.0}; }
  static WeightsScheme distance_band(double radius_km) {
    return {Kind::DistanceBand, 0, radius_km};
  }
};

// k nearest neighbors (ties go to the smaller index) or all units within
// radius_km, with binary weights, optionally row-standardized. Distances use
// haversine for geographic and euclidean for planar coordinates.
SpatialWeights build_weights(std::span<const Coordinate> locations, CoordinateKind kind,
                             WeightsScheme scheme, bool row_standardize);

// Builds weights from explicit neighbor lists (binary weights). Used for
// contiguity structures supplied by the caller.
SpatialWeights weights_from_neighbors(const std::vector<std::vector<std::size_t>>& lists,
                                      bool row_standardize);

SpatialWeights row_standardize(SpatialWeights weights);

struct MoranResult {
  double i = 0.0;
  double expected_i = 0.0;
  // (I - mean(I*)) / sd(I*) over the permutation distribution; NaN when the
  // permutation distribution is degenerate or empty.
  double z_score = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
  double permutation_mean = 0.0;
  double permutation_sd = 0.0;
};

enum class Quadrant { HH, LL, HL, LH };
std::string_view to_string(Quadrant q);

struct LisaRecord {
  double local_i = 0.0;
  Quadrant quadrant = Quadrant::LL;
  double p_value = 1.0;
  double z = 0.0;
  double lag = 0.0;
};

struct LisaResult {
  std::vector<LisaRecord> units;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

struct PermutationOptions {
  std::size_t n_permutations = 999;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Global Moran's I over row-standardized weights with a two-sided
// permutation pseudo p-value: (#{|I*-E| >= |I-E|} + 1) / (P + 1).
MoranResult morans_i(std::span<const double> values, const SpatialWeights& weights,
                     const PermutationOptions& options);

// Local Moran's I_i = (z_i / m2) * sum_j w_ij z_j with m2 = sum z^2 / n and
// conditional-permutation p-values (unit i fixed, its neighbors drawn from
// the other n-1 values).
LisaResult lisa(std::span<const double> values, const SpatialWeights& weights,
                const PermutationOptions& options);

}  // namespace accesskit
