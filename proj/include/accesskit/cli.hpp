#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "accesskit/data_model.hpp"
#include "accesskit/decay.hpp"
#include "accesskit/equity.hpp"
#include "accesskit/fca.hpp"
#include "accesskit/optimize.hpp"
#include "accesskit/spatial_stats.hpp"
#include "accesskit/travel.hpp"

namespace accesskit::cli {

namespace fs = std::filesystem;

struct OptimizeConfig {
  Objective objective = Objective::MaxMinAccess;
  std::size_t budget = 0;
  double unit_size = 1.0;
  // Supply ids eligible for new units; empty means every supply site,
  // including new candidate sites.
  std::vector<std::string> candidate_ids;
  std::size_t max_iters = 1000;
};

// Everything a run needs. Parsed from one JSON file; command-line flags
// override individual fields afterwards.
struct RunConfig {
  fs::path source;  // the config file, if any
  CoordinateKind coordinates = CoordinateKind::Geographic;
  fs::path demand;
  fs::path supply;
  fs::path regions;
  fs::path od_matrix;
  fs::path new_sites;
  CostUnit od_unit = CostUnit::Minutes;
  std::optional<DistanceMetric> metric;
  std::optional<double> speed_km_per_min;
  FcaMethod method = FcaMethod::G2sfca;
  std::optional<DecaySpec> decay;
  bool per_thousand = false;
  std::optional<WeightsScheme> weights;
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
  double hrad_epsilon = kDefaultHradEpsilon;
  bool hrad_with_population = false;
  std::optional<OptimizeConfig> optimize;
  fs::path out = "out";
  std::optional<unsigned> threads;
};

// Config errors are reported as cli.ConfigError naming the offending field.
DecaySpec decay_from_json(const nlohmann::json& doc);
nlohmann::json decay_to_json(const DecaySpec& decay);

RunConfig parse_config(const nlohmann::json& doc, const fs::path& base_dir);
RunConfig load_config(const fs::path& path);
// Effective configuration, echoed next to the outputs.
nlohmann::json config_to_json(const RunConfig& config);

// Demand and supply from the config; new candidate sites are appended to
// the supply list when requested.
Dataset load_dataset(const RunConfig& config, bool include_new_sites);
TravelMatrix travel_matrix(const RunConfig& config, const Dataset& dataset, unsigned threads);

struct AttributeTable {
  CoordinateKind kind = CoordinateKind::Planar;
  std::vector<std::string> ids;
  std::vector<Coordinate> locations;
  std::vector<double> values;
};

// CSV with an id column, lon/lat or x/y columns and the named attribute.
AttributeTable load_attribute_table(const fs::path& path, const std::string& column);

// Output renderers; each returns the exact file contents.
std::string scores_csv(const Dataset& dataset, const AccessibilityResult& result,
                       bool per_thousand);
std::string moran_json(const MoranResult& result);
std::string lisa_csv(const std::vector<std::string>& ids, const LisaResult& result);
std::string hrad_csv(const HradResult& result);
std::string plan_json(const ReallocationPlan& plan, const Dataset& dataset, double unit_size);

// Effective worker count: flag, then ACCESSKIT_THREADS, then config, then 1.
unsigned resolve_threads(std::optional<unsigned> flag, std::optional<unsigned> config_value);

// Full command-line entry point. Returns the process exit status: 0 on
// success, 1 for errors from inner modules, 2 for usage/config errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace accesskit::cli
