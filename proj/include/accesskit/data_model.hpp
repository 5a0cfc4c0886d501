#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace accesskit {

// Geographic coordinates are (lon, lat) in decimal degrees; planar ones are
// (x, y) in meters. A dataset uses exactly one kind.
enum class CoordinateKind { Geographic, Planar };

struct Coordinate {
  double x = 0.0;  // lon or easting
  double y = 0.0;  // lat or northing
};

struct DemandSite {
  std::string id;
  Coordinate location;
  double population = 0.0;
};

// Capacity is > 0 for loaded sites. Zero-capacity sites only appear as new
// candidate locations in capacity-allocation runs.
struct SupplySite {
  std::string id;
  Coordinate location;
  double capacity = 0.0;
};

struct Region {
  std::string id;
  double area_km2 = 0.0;
  double resource = 0.0;
  std::optional<double> population;
};

struct Dataset {
  CoordinateKind kind = CoordinateKind::Geographic;
  std::vector<DemandSite> demand;
  std::vector<SupplySite> supply;
  std::vector<Region> regions;

  // Throws data_model.EmptyDataset unless both site lists are nonempty.
  void require_sites() const;
  // Throws data_model.EmptyDataset when there are no regions.
  void require_regions() const;
};

enum class FileFormat { Csv, GeoJson };

// ".geojson" and ".json" map to GeoJSON, everything else to CSV.
FileFormat format_from_path(const std::filesystem::path& path);

std::string_view to_string(CoordinateKind kind);
CoordinateKind coordinate_kind_from_string(std::string_view text);

struct SupplyLoadOptions {
  // Accept capacity == 0 (candidate sites for allocation runs).
  bool allow_zero_capacity = false;
};

// Loaders validate eagerly and stop at the first defective record; the
// error message names the offending row (CSV line or GeoJSON feature index).
std::vector<DemandSite> load_demand(const std::filesystem::path& path, FileFormat format,
                                    CoordinateKind kind);
std::vector<SupplySite> load_supply(const std::filesystem::path& path, FileFormat format,
                                    CoordinateKind kind, SupplyLoadOptions options = {});
std::vector<Region> load_regions(const std::filesystem::path& path, FileFormat format);

// Same as the loaders, over in-memory text. `source` is used in diagnostics.
std::vector<DemandSite> parse_demand(std::string_view text, FileFormat format, CoordinateKind kind,
                                     const std::string& source = "<demand>");
std::vector<SupplySite> parse_supply(std::string_view text, FileFormat format, CoordinateKind kind,
                                     SupplyLoadOptions options = {},
                                     const std::string& source = "<supply>");
std::vector<Region> parse_regions(std::string_view text, FileFormat format,
                                  const std::string& source = "<regions>");

// CSV serializers emitting the same schemas the loaders read, with
// shortest round-trip number formatting.
std::string demand_to_csv(const std::vector<DemandSite>& sites, CoordinateKind kind);
std::string supply_to_csv(const std::vector<SupplySite>& sites, CoordinateKind kind);
std::string regions_to_csv(const std::vector<Region>& regions);

}  // namespace accesskit
