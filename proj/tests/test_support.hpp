#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "accesskit/data_model.hpp"
#include "accesskit/decay.hpp"
#include "accesskit/travel.hpp"

namespace testing {

using namespace accesskit;

struct Instance {
  Dataset dataset;
  TravelMatrix matrix;
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random demand/supply instance with costs drawn directly (not from
// coordinates). When `all_reachable`, every supply sees at least one
// populated demand site at cost < d0 / 2.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n_demand, std::size_t n_supply,
                                double d0, bool all_reachable, double unreachable_fraction = 0.1) {
  Instance inst;
  inst.dataset.kind = CoordinateKind::Planar;
  for (std::size_t i = 0; i < n_demand; ++i) {
    inst.dataset.demand.push_back({"d" + std::to_string(i),
                                   {uniform(rng, 0, 1e4), uniform(rng, 0, 1e4)},
                                   std::round(uniform(rng, 1, 5000))});
  }
  for (std::size_t j = 0; j < n_supply; ++j) {
    inst.dataset.supply.push_back({"s" + std::to_string(j),
                                   {uniform(rng, 0, 1e4), uniform(rng, 0, 1e4)},
                                   std::round(uniform(rng, 1, 500))});
  }
  inst.matrix = TravelMatrix(n_demand, n_supply, CostUnit::Minutes);
  for (std::size_t i = 0; i < n_demand; ++i) {
    for (std::size_t j = 0; j < n_supply; ++j) {
      inst.matrix(i, j) = uniform(rng, 0, 1) < unreachable_fraction
                              ? std::numeric_limits<double>::infinity()
                              : uniform(rng, 0, 1.5 * d0);
    }
  }
  if (all_reachable) {
    for (std::size_t j = 0; j < n_supply; ++j) {
      inst.matrix(uniform_index(rng, 0, n_demand - 1), j) = uniform(rng, 0, d0 / 2);
    }
  }
  return inst;
}

// One of binary / gaussian / zonal with cutoff d0.
inline DecaySpec random_decay(std::mt19937_64& rng, double d0) {
  switch (uniform_index(rng, 0, 2)) {
    case 0:
      return DecaySpec::binary(d0);
    case 1:
      return DecaySpec::gaussian(uniform(rng, 0.2, 2.0) * d0 * d0, d0);
    default: {
      const std::size_t zones = uniform_index(rng, 1, 4);
      std::vector<double> b;
      for (std::size_t z = 1; z <= zones; ++z) b.push_back(d0 * static_cast<double>(z) / zones);
      return zonal_from_gaussian(b, uniform(rng, 0.5, 2.0) * d0 * d0);
    }
  }
}

// Direct evaluation of A_i = sum_j [S_j f(d_ij) / sum_k D_k f(d_kj)],
// skipping supplies whose inner sum is zero. Independent of Catchment.
inline std::vector<double> g2sfca_oracle(const Dataset& ds, const TravelMatrix& m,
                                         const DecaySpec& f, bool squared_assignment = false) {
  std::vector<double> a(ds.demand.size(), 0.0);
  for (std::size_t i = 0; i < ds.demand.size(); ++i) {
    for (std::size_t j = 0; j < ds.supply.size(); ++j) {
      double denom = 0.0;
      for (std::size_t k = 0; k < ds.demand.size(); ++k) denom += ds.demand[k].population * f(m(k, j));
      if (denom <= 0.0) continue;
      const double w = squared_assignment ? f(m(i, j)) * f(m(i, j)) : f(m(i, j));
      a[i] += ds.supply[j].capacity * w / denom;
    }
  }
  return a;
}

inline bool rel_close(double a, double b, double tol) {
  return a == b || std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("accesskit_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
