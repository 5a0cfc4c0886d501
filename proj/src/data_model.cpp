#include "accesskit/data_model.hpp"

#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "accesskit/csv.hpp"
#include "accesskit/error.hpp"

namespace accesskit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& code, const std::string& source, const std::string& row,
                       const std::string& what) {
  throw Error("data_model", code, source + ": " + row + ": " + what);
}

std::string line_label(std::size_t line) { return "line " + std::to_string(line); }
std::string feature_label(std::size_t index) { return "feature " + std::to_string(index); }

// Header names of the two coordinate columns for a coordinate kind.
std::pair<const char*, const char*> coordinate_columns(CoordinateKind kind) {
  return kind == CoordinateKind::Geographic ? std::pair{"lon", "lat"} : std::pair{"x", "y"};
}

std::size_t require_column(const io::CsvTable& table, std::string_view name,
                           const std::string& source) {
  if (auto col = table.column(name)) return *col;
  fail("MissingColumn", source, "header", "missing column '" + std::string(name) + "'");
}

void check_coordinate_header(const io::CsvTable& table, CoordinateKind kind,
                             const std::string& source) {
  const auto [cx, cy] = coordinate_columns(kind);
  if (table.column(cx) && table.column(cy)) return;
  const auto [ox, oy] = coordinate_columns(kind == CoordinateKind::Geographic
                                               ? CoordinateKind::Planar
                                               : CoordinateKind::Geographic);
  if (table.column(ox) && table.column(oy)) {
    fail("CoordinateKindMismatch", source, "header",
         "dataset declared " + std::string(to_string(kind)) + " coordinates but file has '" +
             ox + "," + oy + "' columns");
  }
  require_column(table, cx, source);
  require_column(table, cy, source);
}

double number_field(const std::string& text, const std::string& column, const std::string& source,
                    const std::string& row) {
  if (auto v = io::parse_double(text)) return *v;
  fail("InvalidNumber", source, row, "column '" + column + "' is not a number: '" + text + "'");
}

void validate_coordinate(const Coordinate& c, CoordinateKind kind, const std::string& source,
                         const std::string& row) {
  if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
    fail("NonFiniteCoordinate", source, row, "coordinate is not finite");
  }
  if (kind == CoordinateKind::Geographic &&
      (c.x < -180.0 || c.x > 180.0 || c.y < -90.0 || c.y > 90.0)) {
    fail("CoordinateOutOfRange", source, row, "lon/lat outside [-180,180]x[-90,90]");
  }
}

void validate_population(double population, const std::string& source, const std::string& row) {
  if (std::isnan(population) || std::isinf(population)) {
    fail("InvalidNumber", source, row, "population is not finite");
  }
  if (population < 0.0) fail("NegativePopulation", source, row, "population is negative");
}

void validate_capacity(double capacity, SupplyLoadOptions options, const std::string& source,
                       const std::string& row) {
  if (!std::isfinite(capacity)) fail("InvalidNumber", source, row, "capacity is not finite");
  if (capacity < 0.0 || (capacity == 0.0 && !options.allow_zero_capacity)) {
    fail("NonPositiveCapacity", source, row, "capacity must be > 0");
  }
}

class IdRegistry {
 public:
  explicit IdRegistry(const std::string& source) : source_(source) {}
  void add(const std::string& id, const std::string& row) {
    if (id.empty()) fail("MissingId", source_, row, "empty id");
    if (!seen_.insert(id).second) fail("DuplicateId", source_, row, "duplicate id '" + id + "'");
  }

 private:
  const std::string& source_;
  std::unordered_set<std::string> seen_;
};

// GeoJSON helpers ------------------------------------------------------------

json parse_feature_collection(std::string_view text, const std::string& source) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail("MalformedGeoJson", source, "document", "invalid JSON");
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    fail("MalformedGeoJson", source, "document", "expected a FeatureCollection");
  }
  return doc;
}

std::string feature_id(const json& feature, const std::string& source, const std::string& row) {
  const json* id = nullptr;
  if (feature.contains("properties") && feature["properties"].is_object() &&
      feature["properties"].contains("id")) {
    id = &feature["properties"]["id"];
  } else if (feature.contains("id")) {
    id = &feature["id"];
  }
  if (id == nullptr) fail("MissingColumn", source, row, "missing property 'id'");
  if (id->is_string()) return id->get<std::string>();
  if (id->is_number_integer()) return std::to_string(id->get<long long>());
  fail("MalformedGeoJson", source, row, "id must be a string or integer");
}

Coordinate point_coordinates(const json& feature, const std::string& source,
                             const std::string& row) {
  if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
    fail("MalformedGeoJson", source, row, "missing geometry");
  }
  const json& geometry = feature["geometry"];
  if (geometry.value("type", "") != "Point") {
    fail("MalformedGeoJson", source, row, "geometry must be a Point");
  }
  const json& coords = geometry.value("coordinates", json::array());
  if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number()) {
    fail("MalformedGeoJson", source, row, "Point needs two numeric coordinates");
  }
  return {coords[0].get<double>(), coords[1].get<double>()};
}

double numeric_property(const json& feature, const char* name, const std::string& source,
                        const std::string& row) {
  if (!feature.contains("properties") || !feature["properties"].is_object() ||
      !feature["properties"].contains(name)) {
    fail("MissingColumn", source, row, std::string("missing property '") + name + "'");
  }
  const json& v = feature["properties"][name];
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return number_field(v.get<std::string>(), name, source, row);
  fail("InvalidNumber", source, row, std::string("property '") + name + "' is not a number");
}

std::optional<double> optional_property(const json& feature, const char* name,
                                        const std::string& source, const std::string& row) {
  if (!feature.contains("properties") || !feature["properties"].is_object() ||
      !feature["properties"].contains(name) || feature["properties"][name].is_null()) {
    return std::nullopt;
  }
  return numeric_property(feature, name, source, row);
}

}  // namespace

void Dataset::require_sites() const {
  if (demand.empty()) throw Error("data_model", "EmptyDataset", "no demand sites");
  if (supply.empty()) throw Error("data_model", "EmptyDataset", "no supply sites");
}

void Dataset::require_regions() const {
  if (regions.empty()) throw Error("data_model", "EmptyDataset", "no regions");
}

FileFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".geojson" || ext == ".json") ? FileFormat::GeoJson : FileFormat::Csv;
}

std::string_view to_string(CoordinateKind kind) {
  return kind == CoordinateKind::Geographic ? "geographic" : "planar";
}

CoordinateKind coordinate_kind_from_string(std::string_view text) {
  if (text == "geographic") return CoordinateKind::Geographic;
  if (text == "planar") return CoordinateKind::Planar;
  throw Error("data_model", "UnknownCoordinateKind",
              "expected 'geographic' or 'planar', got '" + std::string(text) + "'");
}

std::vector<DemandSite> parse_demand(std::string_view text, FileFormat format, CoordinateKind kind,
                                     const std::string& source) {
  std::vector<DemandSite> sites;
  IdRegistry ids(source);
  if (format == FileFormat::Csv) {
    const auto table = io::parse_csv(text, source);
    check_coordinate_header(table, kind, source);
    const auto [cx, cy] = coordinate_columns(kind);
    const std::size_t c_id = require_column(table, "id", source);
    const std::size_t c_x = require_column(table, cx, source);
    const std::size_t c_y = require_column(table, cy, source);
    const std::size_t c_pop = require_column(table, "population", source);
    sites.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const auto label = line_label(table.lines[r]);
      DemandSite site;
      site.id = row[c_id];
      ids.add(site.id, label);
      site.location = {number_field(row[c_x], cx, source, label),
                       number_field(row[c_y], cy, source, label)};
      validate_coordinate(site.location, kind, source, label);
      site.population = number_field(row[c_pop], "population", source, label);
      validate_population(site.population, source, label);
      sites.push_back(std::move(site));
    }
  } else {
    const json doc = parse_feature_collection(text, source);
    std::size_t index = 0;
    for (const json& feature : doc["features"]) {
      const auto label = feature_label(index++);
      DemandSite site;
      site.id = feature_id(feature, source, label);
      ids.add(site.id, label);
      site.location = point_coordinates(feature, source, label);
      validate_coordinate(site.location, kind, source, label);
      site.population = numeric_property(feature, "population", source, label);
      validate_population(site.population, source, label);
      sites.push_back(std::move(site));
    }
  }
  return sites;
}

std::vector<SupplySite> parse_supply(std::string_view text, FileFormat format, CoordinateKind kind,
                                     SupplyLoadOptions options, const std::string& source) {
  std::vector<SupplySite> sites;
  IdRegistry ids(source);
  if (format == FileFormat::Csv) {
    const auto table = io::parse_csv(text, source);
    check_coordinate_header(table, kind, source);
    const auto [cx, cy] = coordinate_columns(kind);
    const std::size_t c_id = require_column(table, "id", source);
    const std::size_t c_x = require_column(table, cx, source);
    const std::size_t c_y = require_column(table, cy, source);
    const std::size_t c_cap = require_column(table, "capacity", source);
    sites.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const auto label = line_label(table.lines[r]);
      SupplySite site;
      site.id = row[c_id];
      ids.add(site.id, label);
      site.location = {number_field(row[c_x], cx, source, label),
                       number_field(row[c_y], cy, source, label)};
      validate_coordinate(site.location, kind, source, label);
      site.capacity = number_field(row[c_cap], "capacity", source, label);
      validate_capacity(site.capacity, options, source, label);
      sites.push_back(std::move(site));
    }
  } else {
    const json doc = parse_feature_collection(text, source);
    std::size_t index = 0;
    for (const json& feature : doc["features"]) {
      const auto label = feature_label(index++);
      SupplySite site;
      site.id = feature_id(feature, source, label);
      ids.add(site.id, label);
      site.location = point_coordinates(feature, source, label);
      validate_coordinate(site.location, kind, source, label);
      site.capacity = numeric_property(feature, "capacity", source, label);
      validate_capacity(site.capacity, options, source, label);
      sites.push_back(std::move(site));
    }
  }
  return sites;
}

namespace {

void validate_region(const Region& region, const std::string& source, const std::string& row) {
  if (!std::isfinite(region.area_km2) || region.area_km2 <= 0.0) {
    fail("NonPositiveArea", source, row, "area_km2 must be > 0");
  }
  if (!std::isfinite(region.resource)) fail("InvalidNumber", source, row, "resource is not finite");
  if (region.resource < 0.0) fail("NegativeResource", source, row, "resource is negative");
  if (region.population) validate_population(*region.population, source, row);
}

}  // namespace

std::vector<Region> parse_regions(std::string_view text, FileFormat format,
                                  const std::string& source) {
  std::vector<Region> regions;
  IdRegistry ids(source);
  if (format == FileFormat::Csv) {
    const auto table = io::parse_csv(text, source);
    const std::size_t c_id = require_column(table, "id", source);
    const std::size_t c_area = require_column(table, "area_km2", source);
    const std::size_t c_res = require_column(table, "resource", source);
    const auto c_pop = table.column("population");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const auto label = line_label(table.lines[r]);
      Region region;
      region.id = row[c_id];
      ids.add(region.id, label);
      region.area_km2 = number_field(row[c_area], "area_km2", source, label);
      region.resource = number_field(row[c_res], "resource", source, label);
      if (c_pop && !row[*c_pop].empty()) {
        region.population = number_field(row[*c_pop], "population", source, label);
      }
      validate_region(region, source, label);
      regions.push_back(std::move(region));
    }
  } else {
    const json doc = parse_feature_collection(text, source);
    std::size_t index = 0;
    for (const json& feature : doc["features"]) {
      const auto label = feature_label(index++);
      Region region;
      region.id = feature_id(feature, source, label);
      ids.add(region.id, label);
      region.area_km2 = numeric_property(feature, "area_km2", source, label);
      region.resource = numeric_property(feature, "resource", source, label);
      region.population = optional_property(feature, "population", source, label);
      validate_region(region, source, label);
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

std::vector<DemandSite> load_demand(const std::filesystem::path& path, FileFormat format,
                                    CoordinateKind kind) {
  return parse_demand(io::read_text_file(path), format, kind, path.string());
}

std::vector<SupplySite> load_supply(const std::filesystem::path& path, FileFormat format,
                                    CoordinateKind kind, SupplyLoadOptions options) {
  return parse_supply(io::read_text_file(path), format, kind, options, path.string());
}

std::vector<Region> load_regions(const std::filesystem::path& path, FileFormat format) {
  return parse_regions(io::read_text_file(path), format, path.string());
}

std::string demand_to_csv(const std::vector<DemandSite>& sites, CoordinateKind kind) {
  const auto [cx, cy] = coordinate_columns(kind);
  std::string out = std::string("id,") + cx + "," + cy + ",population\n";
  for (const auto& s : sites) {
    out += io::csv_field(s.id) + "," + io::format_double(s.location.x) + "," +
           io::format_double(s.location.y) + "," + io::format_double(s.population) + "\n";
  }
  return out;
}

std::string supply_to_csv(const std::vector<SupplySite>& sites, CoordinateKind kind) {
  const auto [cx, cy] = coordinate_columns(kind);
  std::string out = std::string("id,") + cx + "," + cy + ",capacity\n";
  for (const auto& s : sites) {
    out += io::csv_field(s.id) + "," + io::format_double(s.location.x) + "," +
           io::format_double(s.location.y) + "," + io::format_double(s.capacity) + "\n";
  }
  return out;
}

std::string regions_to_csv(const std::vector<Region>& regions) {
  bool any_population = false;
  for (const auto& r : regions) any_population = any_population || r.population.has_value();
  std::string out = any_population ? "id,area_km2,resource,population\n" : "id,area_km2,resource\n";
  for (const auto& r : regions) {
    out += io::csv_field(r.id) + "," + io::format_double(r.area_km2) + "," +
           io::format_double(r.resource);
    if (any_population) out += "," + (r.population ? io::format_double(*r.population) : "");
    out += "\n";
  }
  return out;
}

}  // namespace accesskit
