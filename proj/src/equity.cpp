#include "accesskit/equity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "accesskit/error.hpp"

namespace accesskit {

std::string_view to_string(EquityClass c) {
  switch (c) {
    case EquityClass::Equal: return "equal";
    case EquityClass::RelativelyFair: return "relatively_fair";
    case EquityClass::Unfair: return "unfair";
    case EquityClass::Undefined: return "undefined";
  }
  return "undefined";
}

EquityClass classify_hrad(double value, double epsilon) {
  if (!std::isfinite(value)) return EquityClass::Undefined;
  const double lower = 1.0 - epsilon;
  const double upper = 1.0 + epsilon;
  if (value > upper) return EquityClass::RelativelyFair;
  if (value < lower) return EquityClass::Unfair;
  return EquityClass::Equal;
}

HradResult hrad(std::span<const Region> regions, double epsilon) {
  if (regions.empty()) throw Error("equity", "EmptyRegions", "no regions given");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error("equity", "InvalidEpsilon", "epsilon must lie in [0, 1)");
  }
  double total_resource = 0.0;
  double total_area = 0.0;
  for (const auto& r : regions) {
    total_resource += r.resource;
    total_area += r.area_km2;
  }
  if (!(total_resource > 0.0)) {
    throw Error("equity", "ZeroTotalResource", "total resource over all regions is zero");
  }
  const double overall_density = total_resource / total_area;

  HradResult result;
  result.epsilon = epsilon;
  result.regions.reserve(regions.size());
  for (const auto& r : regions) {
    HradRecord rec;
    rec.region_id = r.id;
    rec.hrad = (r.resource / r.area_km2) / overall_density;
    rec.classification = classify_hrad(rec.hrad, epsilon);
    result.regions.push_back(std::move(rec));
  }
  return result;
}

HradResult hrad_vs_population(std::span<const Region> regions, double epsilon) {
  HradResult result = hrad(regions, epsilon);
  double total_population = 0.0;
  double total_area = 0.0;
  for (const auto& r : regions) {
    if (!r.population) {
      throw Error("equity", "MissingPopulation", "region '" + r.id + "' has no population");
    }
    total_population += *r.population;
    total_area += r.area_km2;
  }
  if (!(total_population > 0.0)) {
    throw Error("equity", "ZeroTotalPopulation", "total population over all regions is zero");
  }
  const double overall_density = total_population / total_area;
  result.with_population = true;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    auto& rec = result.regions[i];
    const double pad = (*regions[i].population / regions[i].area_km2) / overall_density;
    rec.pad = pad;
    if (pad > 0.0) rec.hrad_over_pad = rec.hrad / pad;
  }
  return result;
}

double gini(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw Error("equity", "DimensionMismatch", "values and weights differ in length");
  }
  if (values.empty()) throw Error("equity", "AllZeroValues", "no values given");
  double total_weight = 0.0;
  double total_value = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw Error("equity", "NegativeValue", "values must be finite and >= 0");
    }
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw Error("equity", "NonPositiveWeight", "weights must be finite and > 0");
    }
    total_weight += weights[i];
    total_value += weights[i] * values[i];
  }
  if (!(total_value > 0.0)) {
    throw Error("equity", "AllZeroValues", "weighted value total is zero; gini undefined");
  }

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // 1 - sum over units of (weight share) * (L_prev + L_curr)
  double lorenz_prev = 0.0;
  double cumulative_value = 0.0;
  double area = 0.0;
  for (std::size_t idx : order) {
    cumulative_value += weights[idx] * values[idx];
    const double lorenz = cumulative_value / total_value;
    area += (weights[idx] / total_weight) * (lorenz_prev + lorenz);
    lorenz_prev = lorenz;
  }
  return std::clamp(1.0 - area, 0.0, 1.0);
}

}  // namespace accesskit
