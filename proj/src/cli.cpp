#include "accesskit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "accesskit/csv.hpp"
#include "accesskit/error.hpp"

namespace accesskit::cli {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  throw Error("cli", "ConfigError", field + ": " + what);
}

void reject_unknown_keys(const json& doc, const std::string& context,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      config_error(context.empty() ? key : context + "." + key, "unknown field");
    }
  }
}

double number_at(const json& doc, const char* key, const std::string& context) {
  const std::string field = context + "." + key;
  if (!doc.contains(key)) config_error(field, "required field is missing");
  if (!doc[key].is_number()) config_error(field, "must be a number");
  return doc[key].get<double>();
}

std::string string_at(const json& doc, const char* key, const std::string& field) {
  if (!doc[key].is_string()) config_error(field, "must be a string");
  return doc[key].get<std::string>();
}

std::uint64_t unsigned_at(const json& doc, const char* key, const std::string& field) {
  if (!doc[key].is_number_unsigned() && !(doc[key].is_number_integer() && doc[key].get<long long>() >= 0)) {
    config_error(field, "must be a nonnegative integer");
  }
  return doc[key].get<std::uint64_t>();
}

std::vector<double> number_array(const json& doc, const char* key, const std::string& context) {
  const std::string field = context + "." + key;
  if (!doc[key].is_array()) config_error(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : doc[key]) {
    if (!v.is_number()) config_error(field, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

fs::path resolve_path(const json& doc, const char* key, const fs::path& base_dir) {
  fs::path p = string_at(doc, key, key);
  if (p.is_relative()) p = base_dir / p;
  p = p.lexically_normal();
  if (!fs::exists(p)) config_error(key, "file '" + p.string() + "' does not exist");
  return p;
}

WeightsScheme weights_from_json(const json& doc) {
  if (!doc.is_object()) config_error("weights", "must be an object");
  reject_unknown_keys(doc, "weights", {"knn", "band"});
  if (doc.contains("knn") == doc.contains("band")) {
    config_error("weights", "exactly one of 'knn' or 'band' is required");
  }
  if (doc.contains("knn")) return WeightsScheme::knn(unsigned_at(doc, "knn", "weights.knn"));
  return WeightsScheme::distance_band(number_at(doc, "band", "weights"));
}

json weights_to_json(const WeightsScheme& scheme) {
  if (scheme.kind == WeightsScheme::Kind::Knn) return {{"knn", scheme.k}};
  return {{"band", scheme.radius_km}};
}

// Converts a parse failure of an enum-valued string into a config error.
template <typename F>
auto enum_field(const std::string& field, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    config_error(field, e.what());
  }
}

std::string render_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("io", "WriteFailed", "cannot create directory '" + dir.string() + "'");
  for (const auto& [name, content] : files) io::write_file_atomic(dir / name, content);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const DecaySpec& require_decay(const RunConfig& config) {
  if (!config.decay) config_error("decay", "required field is missing");
  return *config.decay;
}

std::vector<std::size_t> candidate_indices(const OptimizeConfig& opt, const Dataset& dataset) {
  std::vector<std::size_t> out;
  if (opt.candidate_ids.empty()) {
    out.resize(dataset.supply.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = j;
    return out;
  }
  for (const auto& id : opt.candidate_ids) {
    const auto it = std::find_if(dataset.supply.begin(), dataset.supply.end(),
                                 [&](const SupplySite& s) { return s.id == id; });
    if (it == dataset.supply.end()) {
      config_error("optimize.candidates", "unknown supply id '" + id + "'");
    }
    out.push_back(static_cast<std::size_t>(it - dataset.supply.begin()));
  }
  return out;
}

void report_warnings(const AccessibilityResult& result, std::ostream& err) {
  for (const auto& id : result.warnings) {
    err << "warning: supply '" << id << "' captures no demand; its ratio is set to 0\n";
  }
}

json plan_object(const ReallocationPlan& plan, const Dataset& dataset, double unit_size) {
  json allocations = json::array();
  for (std::size_t c = 0; c < plan.candidates.size(); ++c) {
    if (plan.units[c] == 0) continue;
    allocations.push_back({{"supply_id", dataset.supply[plan.candidates[c]].id},
                           {"units_added", plan.units[c]},
                           {"capacity_added", static_cast<double>(plan.units[c]) * unit_size}});
  }
  return {{"objective", std::string(to_string(plan.objective))},
          {"before", plan.objective_before},
          {"after", plan.objective_after},
          {"budget", plan.total_units()},
          {"unit_size", unit_size},
          {"allocations", allocations}};
}

json moran_object(const MoranResult& r) {
  return {{"i", r.i},
          {"expected_i", r.expected_i},
          {"z", r.z_score},
          {"p", r.p_value},
          {"permutations", r.n_permutations},
          {"seed", r.seed}};
}

struct AllocationRun {
  Dataset dataset;
  ReallocationPlan plan;
  double unit_size = 1.0;
};

AllocationRun run_allocation(const RunConfig& config, unsigned threads) {
  if (!config.optimize) config_error("optimize", "required section is missing");
  const OptimizeConfig& opt = *config.optimize;
  if (opt.budget == 0) config_error("optimize.budget", "must be >= 1");
  Dataset dataset = load_dataset(config, true);
  AllocationProblem problem{
      .dataset = dataset,
      .matrix = travel_matrix(config, dataset, threads),
      .decay = require_decay(config),
      .method = config.method,
      .budget = opt.budget,
      .unit_size = opt.unit_size,
      .candidates = candidate_indices(opt, dataset),
      .objective = opt.objective,
      .threads = threads,
  };
  ReallocationPlan plan = greedy_allocate(problem);
  plan = local_search_improve(problem, std::move(plan), opt.max_iters);
  return {std::move(dataset), std::move(plan), opt.unit_size};
}

}  // namespace

DecaySpec decay_from_json(const json& doc) {
  if (!doc.is_object()) config_error("decay", "must be an object");
  reject_unknown_keys(doc, "decay", {"kind", "beta", "d0", "zones", "weights"});
  if (!doc.contains("kind")) config_error("decay.kind", "required field is missing");
  const auto kind =
      enum_field("decay.kind", [&] { return decay_kind_from_string(string_at(doc, "kind", "decay.kind")); });
  const std::string kind_name(to_string(kind));

  auto require_beta = [&] {
    if (!doc.contains("beta")) {
      config_error("decay.beta", "required for " + kind_name +
                                     " decay (no default is assumed; choose it explicitly)");
    }
    return number_at(doc, "beta", "decay");
  };

  switch (kind) {
    case DecayKind::Binary:
      return DecaySpec::binary(number_at(doc, "d0", "decay"));
    case DecayKind::Gaussian: {
      const double beta = require_beta();
      return DecaySpec::gaussian(beta, number_at(doc, "d0", "decay"));
    }
    case DecayKind::Exponential: {
      const double beta = require_beta();
      return DecaySpec::exponential(beta, number_at(doc, "d0", "decay"));
    }
    case DecayKind::Power: {
      const double beta = require_beta();
      return DecaySpec::power(beta, number_at(doc, "d0", "decay"));
    }
    case DecayKind::Zonal: {
      if (!doc.contains("zones")) config_error("decay.zones", "required for zonal decay");
      auto zones = number_array(doc, "zones", "decay");
      DecaySpec spec = doc.contains("weights")
                           ? DecaySpec::zonal(zones, number_array(doc, "weights", "decay"))
                           : zonal_from_gaussian(zones, require_beta());
      if (doc.contains("d0") && number_at(doc, "d0", "decay") != spec.d0()) {
        config_error("decay.d0", "must equal the last zone breakpoint");
      }
      return spec;
    }
  }
  config_error("decay.kind", "unsupported");
}

json decay_to_json(const DecaySpec& decay) {
  json doc = {{"kind", std::string(to_string(decay.kind()))}, {"d0", decay.d0()}};
  switch (decay.kind()) {
    case DecayKind::Binary:
      break;
    case DecayKind::Zonal:
      doc["zones"] = std::vector<double>(decay.breakpoints().begin(), decay.breakpoints().end());
      doc["weights"] = std::vector<double>(decay.weights().begin(), decay.weights().end());
      break;
    default:
      doc["beta"] = decay.beta();
  }
  return doc;
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) config_error("config", "top level must be an object");
  reject_unknown_keys(doc, "",
                      {"coordinates", "demand", "supply", "regions", "od_matrix", "od_unit",
                       "new_sites", "travel", "method", "decay", "per_thousand", "weights",
                       "permutations", "seed", "hrad", "optimize", "out", "threads"});
  RunConfig c;
  if (doc.contains("coordinates")) {
    c.coordinates = enum_field("coordinates", [&] {
      return coordinate_kind_from_string(string_at(doc, "coordinates", "coordinates"));
    });
  }
  for (const char* key : {"demand", "supply", "regions", "od_matrix", "new_sites"}) {
    if (!doc.contains(key)) continue;
    const fs::path p = resolve_path(doc, key, base_dir);
    const std::string k = key;
    if (k == "demand") c.demand = p;
    else if (k == "supply") c.supply = p;
    else if (k == "regions") c.regions = p;
    else if (k == "od_matrix") c.od_matrix = p;
    else c.new_sites = p;
  }
  if (doc.contains("od_unit")) {
    c.od_unit = enum_field("od_unit", [&] { return cost_unit_from_string(string_at(doc, "od_unit", "od_unit")); });
  }
  if (doc.contains("travel")) {
    const json& t = doc["travel"];
    if (!t.is_object()) config_error("travel", "must be an object");
    reject_unknown_keys(t, "travel", {"metric", "speed_km_per_min"});
    if (t.contains("metric")) {
      c.metric = enum_field("travel.metric", [&] {
        return distance_metric_from_string(string_at(t, "metric", "travel.metric"));
      });
    }
    if (t.contains("speed_km_per_min")) c.speed_km_per_min = number_at(t, "speed_km_per_min", "travel");
  }
  if (doc.contains("method")) {
    c.method = enum_field("method", [&] { return fca_method_from_string(string_at(doc, "method", "method")); });
  }
  if (doc.contains("decay")) c.decay = decay_from_json(doc["decay"]);
  if (doc.contains("per_thousand")) {
    if (!doc["per_thousand"].is_boolean()) config_error("per_thousand", "must be true or false");
    c.per_thousand = doc["per_thousand"].get<bool>();
  }
  if (doc.contains("weights")) c.weights = weights_from_json(doc["weights"]);
  if (doc.contains("permutations")) c.permutations = unsigned_at(doc, "permutations", "permutations");
  if (doc.contains("seed")) c.seed = unsigned_at(doc, "seed", "seed");
  if (doc.contains("hrad")) {
    const json& h = doc["hrad"];
    if (!h.is_object()) config_error("hrad", "must be an object");
    reject_unknown_keys(h, "hrad", {"epsilon", "with_population"});
    if (h.contains("epsilon")) c.hrad_epsilon = number_at(h, "epsilon", "hrad");
    if (h.contains("with_population")) {
      if (!h["with_population"].is_boolean()) config_error("hrad.with_population", "must be true or false");
      c.hrad_with_population = h["with_population"].get<bool>();
    }
  }
  if (doc.contains("optimize")) {
    const json& o = doc["optimize"];
    if (!o.is_object()) config_error("optimize", "must be an object");
    reject_unknown_keys(o, "optimize", {"objective", "budget", "unit_size", "candidates", "max_iters"});
    OptimizeConfig opt;
    if (o.contains("objective")) {
      opt.objective = enum_field("optimize.objective", [&] {
        return objective_from_string(string_at(o, "objective", "optimize.objective"));
      });
    }
    if (o.contains("budget")) opt.budget = unsigned_at(o, "budget", "optimize.budget");
    if (o.contains("unit_size")) opt.unit_size = number_at(o, "unit_size", "optimize");
    if (o.contains("max_iters")) opt.max_iters = unsigned_at(o, "max_iters", "optimize.max_iters");
    if (o.contains("candidates")) {
      if (!o["candidates"].is_array()) config_error("optimize.candidates", "must be an array of ids");
      for (const auto& id : o["candidates"]) {
        if (!id.is_string()) config_error("optimize.candidates", "must be an array of ids");
        opt.candidate_ids.push_back(id.get<std::string>());
      }
    }
    c.optimize = opt;
  }
  if (doc.contains("out")) {
    fs::path p = string_at(doc, "out", "out");
    c.out = p.is_relative() ? (base_dir / p).lexically_normal() : p;
  }
  if (doc.contains("threads")) c.threads = static_cast<unsigned>(unsigned_at(doc, "threads", "threads"));
  return c;
}

RunConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) config_error("--config", "file '" + path.string() + "' does not exist");
  const json doc = json::parse(io::read_text_file(path), nullptr, false);
  if (doc.is_discarded()) config_error("--config", "'" + path.string() + "' is not valid JSON");
  RunConfig c = parse_config(doc, path.parent_path());
  c.source = path;
  return c;
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["coordinates"] = std::string(to_string(c.coordinates));
  auto put_path = [&](const char* key, const fs::path& p) {
    if (!p.empty()) doc[key] = p.generic_string();
  };
  put_path("demand", c.demand);
  put_path("supply", c.supply);
  put_path("regions", c.regions);
  put_path("od_matrix", c.od_matrix);
  put_path("new_sites", c.new_sites);
  if (!c.od_matrix.empty()) doc["od_unit"] = std::string(to_string(c.od_unit));
  json travel = json::object();
  if (c.metric) travel["metric"] = std::string(to_string(*c.metric));
  if (c.speed_km_per_min) travel["speed_km_per_min"] = *c.speed_km_per_min;
  if (!travel.empty()) doc["travel"] = travel;
  doc["method"] = std::string(to_string(c.method));
  if (c.decay) doc["decay"] = decay_to_json(*c.decay);
  doc["per_thousand"] = c.per_thousand;
  if (c.weights) doc["weights"] = weights_to_json(*c.weights);
  doc["permutations"] = c.permutations;
  doc["seed"] = c.seed;
  doc["hrad"] = {{"epsilon", c.hrad_epsilon}, {"with_population", c.hrad_with_population}};
  if (c.optimize) {
    doc["optimize"] = {{"objective", std::string(to_string(c.optimize->objective))},
                       {"budget", c.optimize->budget},
                       {"unit_size", c.optimize->unit_size},
                       {"candidates", c.optimize->candidate_ids},
                       {"max_iters", c.optimize->max_iters}};
  }
  return doc;
}

Dataset load_dataset(const RunConfig& config, bool include_new_sites) {
  if (config.demand.empty()) config_error("demand", "required field is missing");
  if (config.supply.empty()) config_error("supply", "required field is missing");
  Dataset dataset;
  dataset.kind = config.coordinates;
  dataset.demand = load_demand(config.demand, format_from_path(config.demand), config.coordinates);
  dataset.supply = load_supply(config.supply, format_from_path(config.supply), config.coordinates);
  if (include_new_sites && !config.new_sites.empty()) {
    auto extra = load_supply(config.new_sites, format_from_path(config.new_sites),
                             config.coordinates, SupplyLoadOptions{.allow_zero_capacity = true});
    for (auto& site : extra) {
      const bool clash = std::any_of(dataset.supply.begin(), dataset.supply.end(),
                                     [&](const SupplySite& s) { return s.id == site.id; });
      if (clash) {
        throw Error("data_model", "DuplicateId",
                    config.new_sites.string() + ": new site id '" + site.id +
                        "' already used by a supply site");
      }
      dataset.supply.push_back(std::move(site));
    }
  }
  dataset.require_sites();
  return dataset;
}

TravelMatrix travel_matrix(const RunConfig& config, const Dataset& dataset, unsigned threads) {
  if (!config.od_matrix.empty()) {
    return load_od_matrix(config.od_matrix, dataset.demand, dataset.supply, config.od_unit);
  }
  TravelOptions options;
  options.metric = config.metric.value_or(dataset.kind == CoordinateKind::Geographic
                                              ? DistanceMetric::Haversine
                                              : DistanceMetric::Euclidean);
  options.speed_km_per_min = config.speed_km_per_min;
  options.threads = threads;
  return build_travel_matrix(dataset, options);
}

AttributeTable load_attribute_table(const fs::path& path, const std::string& column) {
  const auto table = io::read_csv(path);
  const std::string source = path.string();
  AttributeTable out;
  const auto c_id = table.column("id") ? table.column("id") : table.column("unit_id");
  if (!c_id) throw Error("cli", "MissingColumn", source + ": missing column 'id'");
  std::optional<std::size_t> cx, cy;
  if (table.column("lon") && table.column("lat")) {
    out.kind = CoordinateKind::Geographic;
    cx = table.column("lon");
    cy = table.column("lat");
  } else if (table.column("x") && table.column("y")) {
    out.kind = CoordinateKind::Planar;
    cx = table.column("x");
    cy = table.column("y");
  } else {
    throw Error("cli", "MissingColumn", source + ": need 'lon,lat' or 'x,y' columns");
  }
  const auto c_val = table.column(column);
  if (!c_val) throw Error("cli", "MissingColumn", source + ": missing column '" + column + "'");
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source + ": line " + std::to_string(table.lines[r]);
    const auto x = io::parse_double(row[*cx]);
    const auto y = io::parse_double(row[*cy]);
    const auto v = io::parse_double(row[*c_val]);
    if (!x || !y || !v || !std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*v)) {
      throw Error("cli", "InvalidNumber", where + ": non-numeric coordinate or attribute");
    }
    if (!seen.insert(row[*c_id]).second) {
      throw Error("cli", "DuplicateId", where + ": duplicate id '" + row[*c_id] + "'");
    }
    out.ids.push_back(row[*c_id]);
    out.locations.push_back({*x, *y});
    out.values.push_back(*v);
  }
  return out;
}

std::string scores_csv(const Dataset& dataset, const AccessibilityResult& result,
                       bool per_thousand) {
  std::string out = "demand_id,score\n";
  const double scale = per_thousand ? 1000.0 : 1.0;
  for (std::size_t i = 0; i < dataset.demand.size(); ++i) {
    out += io::csv_field(dataset.demand[i].id) + "," + io::format_double(result.scores[i] * scale) +
           "\n";
  }
  return out;
}

std::string moran_json(const MoranResult& result) { return render_json(moran_object(result)); }

std::string lisa_csv(const std::vector<std::string>& ids, const LisaResult& result) {
  std::string out = "unit_id,local_i,quadrant,p_value\n";
  for (std::size_t i = 0; i < result.units.size(); ++i) {
    const auto& u = result.units[i];
    out += io::csv_field(ids[i]) + "," + io::format_double(u.local_i) + "," +
           std::string(to_string(u.quadrant)) + "," + io::format_double(u.p_value) + "\n";
  }
  return out;
}

std::string hrad_csv(const HradResult& result) {
  std::string out = result.with_population ? "region_id,hrad,classification,pad,hrad_over_pad\n"
                                           : "region_id,hrad,classification\n";
  for (const auto& r : result.regions) {
    out += io::csv_field(r.region_id) + "," + io::format_double(r.hrad) + "," +
           std::string(to_string(r.classification));
    if (result.with_population) {
      out += "," + (r.pad ? io::format_double(*r.pad) : std::string()) + "," +
             (r.hrad_over_pad ? io::format_double(*r.hrad_over_pad) : std::string());
    }
    out += "\n";
  }
  return out;
}

std::string plan_json(const ReallocationPlan& plan, const Dataset& dataset, double unit_size) {
  return render_json(plan_object(plan, dataset, unit_size));
}

unsigned resolve_threads(std::optional<unsigned> flag, std::optional<unsigned> config_value) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("ACCESSKIT_THREADS")) {
    const auto v = io::parse_double(env);
    if (!v || *v < 1.0 || *v != std::floor(*v)) {
      config_error("ACCESSKIT_THREADS", "must be a positive integer");
    }
    return static_cast<unsigned>(*v);
  }
  if (config_value) return std::max(1u, *config_value);
  return 1;
}

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::string> method;
  bool per_thousand = false;
  std::string values;
  std::string column;
  std::optional<std::size_t> knn;
  std::optional<double> band;
  std::optional<std::size_t> perms;
  std::optional<std::uint64_t> seed;
  std::string regions;
  bool with_population = false;
  std::optional<double> epsilon;
  std::optional<std::size_t> budget;
  std::optional<double> unit_size;
  std::optional<std::string> objective;
};

RunConfig config_with_overrides(const Flags& f) {
  RunConfig c = load_config(f.config);
  if (f.out) c.out = *f.out;
  if (f.method) c.method = enum_field("--method", [&] { return fca_method_from_string(*f.method); });
  if (f.per_thousand) c.per_thousand = true;
  if (f.perms) c.permutations = *f.perms;
  if (f.seed) c.seed = *f.seed;
  if (f.budget || f.unit_size || f.objective) {
    if (!c.optimize) c.optimize = OptimizeConfig{};
    if (f.budget) c.optimize->budget = *f.budget;
    if (f.unit_size) c.optimize->unit_size = *f.unit_size;
    if (f.objective) {
      c.optimize->objective = enum_field("--objective", [&] { return objective_from_string(*f.objective); });
    }
  }
  return c;
}

WeightsScheme scheme_from_flags(const Flags& f) {
  if (f.knn) return WeightsScheme::knn(*f.knn);
  if (f.band) return WeightsScheme::distance_band(*f.band);
  config_error("--knn/--band", "one neighbor scheme is required");
}

int cmd_access(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig c = config_with_overrides(f);
  const unsigned threads = resolve_threads(f.threads, c.threads);
  const DecaySpec& decay = require_decay(c);
  const Dataset dataset = load_dataset(c, false);
  const TravelMatrix matrix = travel_matrix(c, dataset, threads);
  const auto result = compute_accessibility(c.method, dataset, matrix, decay, threads);
  report_warnings(result, err);
  write_outputs(c.out, {{"access_scores.csv", scores_csv(dataset, result, c.per_thousand)},
                        {"run_config.json", render_json(config_to_json(c))}});
  out << "wrote " << (c.out / "access_scores.csv").string() << " (" << dataset.demand.size()
      << " demand sites, method " << to_string(c.method) << ")\n";
  return 0;
}

int cmd_stats(const Flags& f, bool local, std::ostream& out, std::ostream& err) {
  const AttributeTable table = load_attribute_table(f.values, f.column);
  const SpatialWeights weights =
      build_weights(table.locations, table.kind, scheme_from_flags(f), true);
  for (std::size_t i : weights.isolated) {
    err << "warning: unit '" << table.ids[i] << "' has no neighbors within the band\n";
  }
  PermutationOptions options;
  options.n_permutations = f.perms.value_or(999);
  options.seed = f.seed.value_or(0);
  options.threads = resolve_threads(f.threads, std::nullopt);
  const fs::path dir = f.out.value_or(".");
  if (local) {
    const auto result = lisa(table.values, weights, options);
    write_outputs(dir, {{"lisa.csv", lisa_csv(table.ids, result)}});
    out << "wrote " << (dir / "lisa.csv").string() << "\n";
  } else {
    const auto result = morans_i(table.values, weights, options);
    write_outputs(dir, {{"moran.json", moran_json(result)}});
    out << "Moran's I = " << io::format_double(result.i) << ", p = " << io::format_double(result.p_value)
        << "\n";
  }
  return 0;
}

int cmd_hrad(const Flags& f, std::ostream& out) {
  const auto regions = load_regions(f.regions, format_from_path(f.regions));
  const double eps = f.epsilon.value_or(kDefaultHradEpsilon);
  const auto result = f.with_population ? hrad_vs_population(regions, eps) : hrad(regions, eps);
  const fs::path dir = f.out.value_or(".");
  write_outputs(dir, {{"hrad.csv", hrad_csv(result)}});
  out << "wrote " << (dir / "hrad.csv").string() << " (" << regions.size() << " regions)\n";
  return 0;
}

int cmd_optimize(const Flags& f, std::ostream& out) {
  const RunConfig c = config_with_overrides(f);
  const unsigned threads = resolve_threads(f.threads, c.threads);
  const AllocationRun run = run_allocation(c, threads);
  write_outputs(c.out, {{"plan.json", plan_json(run.plan, run.dataset, run.unit_size)},
                        {"run_config.json", render_json(config_to_json(c))}});
  out << to_string(run.plan.objective) << ": " << io::format_double(run.plan.objective_before)
      << " -> " << io::format_double(run.plan.objective_after) << "\n";
  return 0;
}

int cmd_report(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig c = config_with_overrides(f);
  const unsigned threads = resolve_threads(f.threads, c.threads);
  const DecaySpec& decay = require_decay(c);
  if (!c.weights) config_error("weights", "required for report");
  if (c.regions.empty()) config_error("regions", "required for report");

  const Dataset dataset = load_dataset(c, false);
  const TravelMatrix matrix = travel_matrix(c, dataset, threads);
  const auto access = compute_accessibility(c.method, dataset, matrix, decay, threads);
  report_warnings(access, err);

  std::vector<Coordinate> locations;
  std::vector<std::string> ids;
  for (const auto& d : dataset.demand) {
    locations.push_back(d.location);
    ids.push_back(d.id);
  }
  const SpatialWeights weights = build_weights(locations, dataset.kind, *c.weights, true);
  const PermutationOptions perm{c.permutations, c.seed, threads};
  const auto moran = morans_i(access.scores, weights, perm);
  const auto local = lisa(access.scores, weights, perm);

  const auto regions = load_regions(c.regions, format_from_path(c.regions));
  const auto equity = c.hrad_with_population ? hrad_vs_population(regions, c.hrad_epsilon)
                                             : hrad(regions, c.hrad_epsilon);
  const AllocationRun allocation = run_allocation(c, threads);

  const double scale = c.per_thousand ? 1000.0 : 1.0;
  const auto [lo, hi] = std::minmax_element(access.scores.begin(), access.scores.end());
  double sum = 0.0, weighted = 0.0, population = 0.0;
  for (std::size_t i = 0; i < access.scores.size(); ++i) {
    sum += access.scores[i] * scale;
    weighted += access.scores[i] * scale * dataset.demand[i].population;
    population += dataset.demand[i].population;
  }
  std::map<std::string, std::size_t> quadrants{{"HH", 0}, {"LL", 0}, {"HL", 0}, {"LH", 0}};
  std::size_t significant = 0;
  for (const auto& u : local.units) {
    ++quadrants[std::string(to_string(u.quadrant))];
    if (u.p_value <= 0.05) ++significant;
  }
  std::map<std::string, std::size_t> classes{
      {"equal", 0}, {"relatively_fair", 0}, {"unfair", 0}, {"undefined", 0}};
  for (const auto& r : equity.regions) ++classes[std::string(to_string(r.classification))];

  const json summary = {
      {"generated_at", utc_timestamp()},
      {"method", std::string(to_string(c.method))},
      {"decay", decay_to_json(effective_decay(c.method, decay))},
      {"access",
       {{"n_demand", dataset.demand.size()},
        {"n_supply", dataset.supply.size()},
        {"score_scale", scale},
        {"min", *lo * scale},
        {"max", *hi * scale},
        {"mean", sum / static_cast<double>(access.scores.size())},
        {"population_weighted_mean", population > 0.0 ? weighted / population : 0.0},
        {"zero_capture_supplies", access.warnings}}},
      {"moran", moran_object(moran)},
      {"lisa", {{"quadrants", quadrants}, {"significant_at_0.05", significant}}},
      {"hrad", {{"epsilon", equity.epsilon}, {"classes", classes}}},
      {"optimize", plan_object(allocation.plan, allocation.dataset, allocation.unit_size)},
  };

  write_outputs(c.out,
                {{"access_scores.csv", scores_csv(dataset, access, c.per_thousand)},
                 {"moran.json", moran_json(moran)},
                 {"lisa.csv", lisa_csv(ids, local)},
                 {"hrad.csv", hrad_csv(equity)},
                 {"plan.json", plan_json(allocation.plan, allocation.dataset, allocation.unit_size)},
                 {"run_config.json", render_json(config_to_json(c))},
                 {"summary.json", render_json(summary)}});
  out << "report written to " << c.out.string() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial accessibility, autocorrelation and equity toolkit", "accesskit"};
  app.require_subcommand(1);
  Flags f;

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", f.threads, "Worker threads (default: $ACCESSKIT_THREADS or 1)")
        ->check(CLI::PositiveNumber);
  };

  auto* access = app.add_subcommand("access", "Compute accessibility scores");
  access->add_option("--config", f.config, "Run configuration JSON")->required();
  access->add_option("--method", f.method, "g2sfca|two_sfca|e2sfca|m2sfca");
  access->add_flag("--per-thousand", f.per_thousand, "Report scores per 1000 people");
  access->add_option("--out", f.out, "Output directory");
  add_threads(access);

  auto add_stats = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--values", f.values, "CSV with id, coordinates and attribute")->required();
    sub->add_option("--column", f.column, "Attribute column")->required();
    auto* knn = sub->add_option("--knn", f.knn, "k nearest neighbors");
    auto* band = sub->add_option("--band", f.band, "Distance band radius (km)");
    knn->excludes(band);
    sub->add_option("--perms", f.perms, "Permutations (default 999)");
    sub->add_option("--seed", f.seed, "Random seed (default 0)");
    sub->add_option("--out", f.out, "Output directory (default .)");
    add_threads(sub);
    return sub;
  };
  auto* moran = add_stats("moran", "Global Moran's I");
  auto* lisa_cmd = add_stats("lisa", "Local Moran's I (LISA)");

  auto* hrad_cmd = app.add_subcommand("hrad", "Health resource agglomeration degree");
  hrad_cmd->add_option("--regions", f.regions, "Regions CSV")->required();
  hrad_cmd->add_flag("--with-population", f.with_population, "Add pad and hrad/pad columns");
  hrad_cmd->add_option("--epsilon", f.epsilon, "Equality tolerance (default 0.05)");
  hrad_cmd->add_option("--out", f.out, "Output directory (default .)");

  auto* optimize = app.add_subcommand("optimize", "Allocate additional capacity");
  optimize->add_option("--config", f.config, "Run configuration JSON")->required();
  optimize->add_option("--budget", f.budget, "Capacity units to allocate");
  optimize->add_option("--unit-size", f.unit_size, "Capacity per unit");
  optimize->add_option("--objective", f.objective, "max_min_access|min_weighted_gini|min_variance");
  optimize->add_option("--out", f.out, "Output directory");
  add_threads(optimize);

  auto* report = app.add_subcommand("report", "Run the full pipeline");
  report->add_option("--config", f.config, "Run configuration JSON")->required();
  report->add_option("--out", f.out, "Output directory");
  report->add_option("--seed", f.seed, "Override the config seed");
  report->add_option("--perms", f.perms, "Override the permutation count");
  add_threads(report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (access->parsed()) return cmd_access(f, out, err);
    if (moran->parsed()) return cmd_stats(f, false, out, err);
    if (lisa_cmd->parsed()) return cmd_stats(f, true, out, err);
    if (hrad_cmd->parsed()) return cmd_hrad(f, out);
    if (optimize->parsed()) return cmd_optimize(f, out);
    if (report->parsed()) return cmd_report(f, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.module() == "cli" ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace accesskit::cli
