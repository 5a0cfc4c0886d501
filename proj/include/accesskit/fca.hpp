#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accesskit/data_model.hpp"
#include "accesskit/decay.hpp"
#include "accesskit/travel.hpp"

namespace accesskit {

enum class FcaMethod { TwoSfca, E2sfca, G2sfca, M2sfca };

std::string_view to_string(FcaMethod method);
FcaMethod fca_method_from_string(std::string_view text);

struct AccessibilityResult {
  FcaMethod method = FcaMethod::G2sfca;
  DecaySpec decay;
  // A_i per demand site, resource units per person.
  std::vector<double> scores;
  // R_j per supply site.
  std::vector<double> supply_ratios;
  // Supply ids whose catchment holds no weighted demand (R_j forced to 0).
  std::vector<std::string> warnings;
};

struct SupplyRatios {
  std::vector<double> ratios;
  std::vector<std::string> warnings;
};

// Decay weights f(d_ij) and captured demand sum_k D_k f(d_kj) for one
// dataset/matrix/decay triple. Neither depends on capacities, so scores for
// modified capacities can be recomputed without re-evaluating the decay.
class Catchment {
 public:
  Catchment(const Dataset& dataset, const TravelMatrix& matrix, const DecaySpec& decay,
            unsigned threads = 1);

  std::size_t n_demand() const noexcept { return n_demand_; }
  std::size_t n_supply() const noexcept { return n_supply_; }
  double weight(std::size_t demand, std::size_t supply) const {
    return weights_[demand * n_supply_ + supply];
  }
  const std::vector<double>& captured_demand() const noexcept { return captured_; }

  // R_j = S_j / captured_j, or 0 when nothing is captured.
  std::vector<double> supply_ratios(std::span<const double> capacity) const;

  // Scores for the given capacities. TwoSfca and E2sfca use the same
  // weighted sum as G2sfca; M2sfca weights the assignment step by f^2.
  std::vector<double> scores(FcaMethod method, std::span<const double> capacity,
                             unsigned threads = 1) const;

 private:
  std::size_t n_demand_ = 0;
  std::size_t n_supply_ = 0;
  std::vector<double> weights_;
  std::vector<double> captured_;
};

SupplyRatios step1_supply_ratios(const Dataset& dataset, const TravelMatrix& matrix,
                                 const DecaySpec& decay, unsigned threads = 1);

AccessibilityResult g2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& decay, unsigned threads = 1);
// Binary catchment of radius d0.
AccessibilityResult two_sfca(const Dataset& dataset, const TravelMatrix& matrix, double d0,
                             unsigned threads = 1);
// Requires a zonal decay (fca.WrongDecayKind otherwise).
AccessibilityResult e2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& zonal_decay, unsigned threads = 1);
// A_i = sum_j f(d_ij)^2 S_j / sum_k D_k f(d_kj)
AccessibilityResult m2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& decay, unsigned threads = 1);

// Dispatches on method. TwoSfca uses binary decay at decay.d0().
AccessibilityResult compute_accessibility(FcaMethod method, const Dataset& dataset,
                                          const TravelMatrix& matrix, const DecaySpec& decay,
                                          unsigned threads = 1);

// The decay actually applied by `method` given the configured one.
DecaySpec effective_decay(FcaMethod method, const DecaySpec& decay);

std::vector<double> capacities(const Dataset& dataset);

}  // namespace accesskit
