#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accesskit/data_model.hpp"

namespace accesskit {

inline constexpr double kEarthRadiusKm = 6371.0;

enum class CostUnit { Km, Minutes };
enum class DistanceMetric { Haversine, Euclidean };

std::string_view to_string(CostUnit unit);
CostUnit cost_unit_from_string(std::string_view text);
std::string_view to_string(DistanceMetric metric);
DistanceMetric distance_metric_from_string(std::string_view text);

// Dense demand x supply cost matrix, row-major. Entries are >= 0 and either
// finite or +infinity (unreachable).
class TravelMatrix {
 public:
  TravelMatrix() = default;
  TravelMatrix(std::size_t n_demand, std::size_t n_supply, CostUnit unit, double fill = 0.0);

  std::size_t n_demand() const noexcept { return n_demand_; }
  std::size_t n_supply() const noexcept { return n_supply_; }
  CostUnit unit() const noexcept { return unit_; }

  double operator()(std::size_t demand, std::size_t supply) const {
    return cost_[demand * n_supply_ + supply];
  }
  double& operator()(std::size_t demand, std::size_t supply) {
    return cost_[demand * n_supply_ + supply];
  }
  std::span<const double> row(std::size_t demand) const {
    return {cost_.data() + demand * n_supply_, n_supply_};
  }
  std::span<const double> values() const noexcept { return cost_; }

 private:
  std::size_t n_demand_ = 0;
  std::size_t n_supply_ = 0;
  CostUnit unit_ = CostUnit::Km;
  std::vector<double> cost_;
};

// Great-circle distance between (lon, lat) points in degrees, in km.
double haversine_km(Coordinate p, Coordinate q);
// Straight-line distance between planar points given in meters, in km.
double euclidean_km(Coordinate p, Coordinate q);
// Distance in km using the metric implied by the coordinate kind.
double distance_km(CoordinateKind kind, Coordinate p, Coordinate q);

struct TravelOptions {
  DistanceMetric metric = DistanceMetric::Haversine;
  // When set, costs are converted from km to minutes.
  std::optional<double> speed_km_per_min;
  unsigned threads = 1;
};

TravelMatrix build_travel_matrix(const Dataset& dataset, const TravelOptions& options);

// OD file with header demand_id,supply_id,cost. Pairs not listed are
// unreachable (+infinity).
TravelMatrix load_od_matrix(const std::filesystem::path& path,
                            const std::vector<DemandSite>& demand,
                            const std::vector<SupplySite>& supply, CostUnit unit);
TravelMatrix parse_od_matrix(std::string_view text, const std::vector<DemandSite>& demand,
                             const std::vector<SupplySite>& supply, CostUnit unit,
                             const std::string& source = "<od>");

}  // namespace accesskit
