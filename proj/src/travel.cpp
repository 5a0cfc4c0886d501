#include "accesskit/travel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "accesskit/csv.hpp"
#include "accesskit/error.hpp"
#include "accesskit/parallel.hpp"

namespace accesskit {

TravelMatrix::TravelMatrix(std::size_t n_demand, std::size_t n_supply, CostUnit unit, double fill)
    : n_demand_(n_demand), n_supply_(n_supply), unit_(unit), cost_(n_demand * n_supply, fill) {}

std::string_view to_string(CostUnit unit) { return unit == CostUnit::Km ? "km" : "minutes"; }

CostUnit cost_unit_from_string(std::string_view text) {
  if (text == "km") return CostUnit::Km;
  if (text == "minutes" || text == "min") return CostUnit::Minutes;
  throw Error("travel", "UnknownUnit", "expected 'km' or 'minutes', got '" + std::string(text) + "'");
}

std::string_view to_string(DistanceMetric metric) {
  return metric == DistanceMetric::Haversine ? "haversine" : "euclidean";
}

DistanceMetric distance_metric_from_string(std::string_view text) {
  if (text == "haversine") return DistanceMetric::Haversine;
  if (text == "euclidean") return DistanceMetric::Euclidean;
  throw Error("travel", "UnknownMetric",
              "expected 'haversine' or 'euclidean', got '" + std::string(text) + "'");
}

double haversine_km(Coordinate p, Coordinate q) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = p.y * deg;
  const double phi2 = q.y * deg;
  const double s_lat = std::sin((phi2 - phi1) / 2.0);
  const double s_lon = std::sin((q.x - p.x) * deg / 2.0);
  const double a = s_lat * s_lat + std::cos(phi1) * std::cos(phi2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

double euclidean_km(Coordinate p, Coordinate q) {
  return std::hypot(q.x - p.x, q.y - p.y) / 1000.0;
}

double distance_km(CoordinateKind kind, Coordinate p, Coordinate q) {
  return kind == CoordinateKind::Geographic ? haversine_km(p, q) : euclidean_km(p, q);
}

TravelMatrix build_travel_matrix(const Dataset& dataset, const TravelOptions& options) {
  const bool geographic = dataset.kind == CoordinateKind::Geographic;
  if ((options.metric == DistanceMetric::Haversine) != geographic) {
    throw Error("travel", "MetricMismatch",
                std::string(to_string(options.metric)) + " metric on " +
                    std::string(to_string(dataset.kind)) + " coordinates");
  }
  if (options.speed_km_per_min &&
      !(std::isfinite(*options.speed_km_per_min) && *options.speed_km_per_min > 0.0)) {
    throw Error("travel", "InvalidSpeed", "speed must be a positive finite km/min value");
  }

  const auto unit = options.speed_km_per_min ? CostUnit::Minutes : CostUnit::Km;
  TravelMatrix matrix(dataset.demand.size(), dataset.supply.size(), unit);
  const auto& demand = dataset.demand;
  const auto& supply = dataset.supply;
  const auto speed = options.speed_km_per_min;
  parallel_for(demand.size(), options.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < supply.size(); ++j) {
      const double km = geographic ? haversine_km(demand[i].location, supply[j].location)
                                   : euclidean_km(demand[i].location, supply[j].location);
      matrix(i, j) = speed ? km / *speed : km;
    }
  });
  return matrix;
}

TravelMatrix parse_od_matrix(std::string_view text, const std::vector<DemandSite>& demand,
                             const std::vector<SupplySite>& supply, CostUnit unit,
                             const std::string& source) {
  const auto table = io::parse_csv(text, source);
  auto col = [&](std::string_view name) {
    if (auto c = table.column(name)) return *c;
    throw Error("travel", "MissingColumn", source + ": missing column '" + std::string(name) + "'");
  };
  const std::size_t c_d = col("demand_id");
  const std::size_t c_s = col("supply_id");
  const std::size_t c_cost = col("cost");

  std::unordered_map<std::string, std::size_t> demand_index;
  std::unordered_map<std::string, std::size_t> supply_index;
  for (std::size_t i = 0; i < demand.size(); ++i) demand_index.emplace(demand[i].id, i);
  for (std::size_t j = 0; j < supply.size(); ++j) supply_index.emplace(supply[j].id, j);

  constexpr double inf = std::numeric_limits<double>::infinity();
  TravelMatrix matrix(demand.size(), supply.size(), unit, inf);
  std::vector<bool> seen(demand.size() * supply.size(), false);

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source + ": line " + std::to_string(table.lines[r]);
    const auto d = demand_index.find(row[c_d]);
    if (d == demand_index.end()) {
      throw Error("travel", "UnknownId", where + ": unknown demand id '" + row[c_d] + "'");
    }
    const auto s = supply_index.find(row[c_s]);
    if (s == supply_index.end()) {
      throw Error("travel", "UnknownId", where + ": unknown supply id '" + row[c_s] + "'");
    }
    const auto cost = io::parse_double(row[c_cost]);
    if (!cost || std::isnan(*cost)) {
      throw Error("travel", "InvalidNumber", where + ": cost is not a number");
    }
    if (*cost < 0.0) throw Error("travel", "NegativeCost", where + ": cost is negative");
    const std::size_t k = d->second * supply.size() + s->second;
    if (seen[k]) {
      throw Error("travel", "DuplicatePair",
                  where + ": pair (" + row[c_d] + ", " + row[c_s] + ") listed twice");
    }
    seen[k] = true;
    matrix(d->second, s->second) = *cost;
  }
  return matrix;
}

TravelMatrix load_od_matrix(const std::filesystem::path& path,
                            const std::vector<DemandSite>& demand,
                            const std::vector<SupplySite>& supply, CostUnit unit) {
  return parse_od_matrix(io::read_text_file(path), demand, supply, unit, path.string());
}

}  // namespace accesskit
