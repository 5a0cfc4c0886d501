#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accesskit/data_model.hpp"

namespace accesskit {

inline constexpr double kDefaultHradEpsilon = 0.05;

enum class EquityClass { Equal, RelativelyFair, Unfair, Undefined };
std::string_view to_string(EquityClass c);

struct HradRecord {
  std::string region_id;
  double hrad = 0.0;
  EquityClass classification = EquityClass::Undefined;
  // Population agglomeration degree and hrad/pad, only for population runs.
  // hrad_over_pad is empty for uninhabited regions (pad = 0).
  std::optional<double> pad;
  std::optional<double> hrad_over_pad;
};

struct HradResult {
  std::vector<HradRecord> regions;
  double epsilon = kDefaultHradEpsilon;
  bool with_population = false;
};

// Equal on [1 - eps, 1 + eps], relatively fair above, unfair below.
EquityClass classify_hrad(double hrad, double epsilon = kDefaultHradEpsilon);

// Resource density of each region relative to the whole study area:
// (HR_i / A_i) / (sum HR / sum A).
HradResult hrad(std::span<const Region> regions, double epsilon = kDefaultHradEpsilon);

// hrad plus the same ratio computed on population (pad) and hrad / pad.
HradResult hrad_vs_population(std::span<const Region> regions,
                              double epsilon = kDefaultHradEpsilon);

// Weighted Gini coefficient: units sorted by value, Lorenz curve integrated
// with the trapezoid rule over cumulative weight shares.
double gini(std::span<const double> values, std::span<const double> weights);

}  // namespace accesskit
