// Generates the bundled synthetic city: demand points clustered around a
// few neighborhood centers, hospitals weighted toward the core, a 4x3 grid
// of reporting regions and a handful of zero-capacity candidate sites.
//
//   make_synthetic_city OUT_DIR [SEED]

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "accesskit/csv.hpp"
#include "accesskit/data_model.hpp"

namespace fs = std::filesystem;
using namespace accesskit;

namespace {

constexpr double kLonMin = 116.80, kLonMax = 117.20;
constexpr double kLatMin = 36.50, kLatMax = 36.80;
constexpr int kGridCols = 4, kGridRows = 3;

double round6(double v) { return std::round(v * 1e6) / 1e6; }

Coordinate clamp_to_city(Coordinate c) {
  return {round6(std::clamp(c.x, kLonMin, kLonMax)), round6(std::clamp(c.y, kLatMin, kLatMax))};
}

int grid_cell(Coordinate c) {
  const int col = std::min(kGridCols - 1, static_cast<int>((c.x - kLonMin) / (kLonMax - kLonMin) * kGridCols));
  const int row = std::min(kGridRows - 1, static_cast<int>((c.y - kLatMin) / (kLatMax - kLatMin) * kGridRows));
  return row * kGridCols + col;
}

double cell_area_km2(int row) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (kLatMax - kLatMin) / kGridRows;
  const double dlon = (kLonMax - kLonMin) / kGridCols;
  const double lat0 = kLatMin + row * dlat;
  // spherical zone area of a lon/lat cell, R = 6371 km
  return 6371.0 * 6371.0 * dlon * deg * (std::sin((lat0 + dlat) * deg) - std::sin(lat0 * deg));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic_city OUT_DIR [SEED]\n";
    return 2;
  }
  const fs::path out = argv[1];
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20201107ULL;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::array<Coordinate, 6> centers{{{117.00, 36.66},
                                           {116.90, 36.70},
                                           {117.10, 36.62},
                                           {116.88, 36.56},
                                           {117.14, 36.74},
                                           {117.02, 36.54}}};
  const std::array<double, 6> spread{0.035, 0.03, 0.03, 0.04, 0.035, 0.04};

  std::vector<DemandSite> demand;
  for (int i = 0; i < 500; ++i) {
    const std::size_t c = static_cast<std::size_t>(unit(rng) * centers.size()) % centers.size();
    const Coordinate loc = clamp_to_city({centers[c].x + spread[c] * jitter(rng),
                                          centers[c].y + spread[c] * 0.8 * jitter(rng)});
    const double population = std::round(200.0 + 2800.0 * unit(rng) * (c == 0 ? 1.5 : 1.0));
    demand.push_back({"d" + std::to_string(i + 1), loc, population});
  }

  std::vector<SupplySite> supply;
  for (int j = 0; j < 25; ++j) {
    const std::size_t c = j < 10 ? 0 : static_cast<std::size_t>(j % centers.size());
    const Coordinate loc = clamp_to_city({centers[c].x + 0.03 * jitter(rng),
                                          centers[c].y + 0.025 * jitter(rng)});
    const double beds = std::round(50.0 + 450.0 * unit(rng));
    supply.push_back({"h" + std::to_string(j + 1), loc, beds});
  }

  std::vector<SupplySite> candidates;
  const std::array<Coordinate, 5> new_sites{{{116.84, 36.52},
                                             {117.16, 36.78},
                                             {116.86, 36.74},
                                             {117.17, 36.55},
                                             {117.04, 36.76}}};
  for (std::size_t k = 0; k < new_sites.size(); ++k) {
    candidates.push_back({"n" + std::to_string(k + 1), new_sites[k], 0.0});
  }

  std::vector<Region> regions(kGridCols * kGridRows);
  for (int r = 0; r < kGridRows; ++r) {
    for (int c = 0; c < kGridCols; ++c) {
      Region& region = regions[r * kGridCols + c];
      region.id = "r" + std::to_string(r * kGridCols + c + 1);
      region.area_km2 = std::round(cell_area_km2(r) * 1000.0) / 1000.0;
      region.population = 0.0;
    }
  }
  for (const auto& d : demand) *regions[grid_cell(d.location)].population += d.population;
  for (const auto& s : supply) regions[grid_cell(s.location)].resource += s.capacity;

  fs::create_directories(out);
  io::write_file_atomic(out / "demand.csv", demand_to_csv(demand, CoordinateKind::Geographic));
  io::write_file_atomic(out / "supply.csv", supply_to_csv(supply, CoordinateKind::Geographic));
  io::write_file_atomic(out / "new_sites.csv", supply_to_csv(candidates, CoordinateKind::Geographic));
  io::write_file_atomic(out / "regions.csv", regions_to_csv(regions));
  std::cout << "wrote synthetic city to " << out.string() << "\n";
  return 0;
}
