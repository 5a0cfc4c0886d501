#include "accesskit/fca.hpp"

#include "accesskit/error.hpp"
#include "accesskit/parallel.hpp"

namespace accesskit {

namespace {

void check_dimensions(const Dataset& dataset, const TravelMatrix& matrix) {
  if (matrix.n_demand() != dataset.demand.size() || matrix.n_supply() != dataset.supply.size()) {
    throw Error("fca", "DimensionMismatch",
                "travel matrix is " + std::to_string(matrix.n_demand()) + "x" +
                    std::to_string(matrix.n_supply()) + " but dataset has " +
                    std::to_string(dataset.demand.size()) + " demand and " +
                    std::to_string(dataset.supply.size()) + " supply sites");
  }
}

std::vector<std::string> zero_capture_warnings(const Dataset& dataset, const Catchment& c) {
  std::vector<std::string> warnings;
  for (std::size_t j = 0; j < c.n_supply(); ++j) {
    if (!(c.captured_demand()[j] > 0.0)) warnings.push_back(dataset.supply[j].id);
  }
  return warnings;
}

AccessibilityResult run(FcaMethod method, const Dataset& dataset, const TravelMatrix& matrix,
                        const DecaySpec& decay, unsigned threads) {
  const Catchment catchment(dataset, matrix, decay, threads);
  const auto cap = capacities(dataset);
  AccessibilityResult result{method, decay, {}, {}, {}};
  result.supply_ratios = catchment.supply_ratios(cap);
  result.scores = catchment.scores(method, cap, threads);
  result.warnings = zero_capture_warnings(dataset, catchment);
  return result;
}

}  // namespace

std::string_view to_string(FcaMethod method) {
  switch (method) {
    case FcaMethod::TwoSfca: return "two_sfca";
    case FcaMethod::E2sfca: return "e2sfca";
    case FcaMethod::G2sfca: return "g2sfca";
    case FcaMethod::M2sfca: return "m2sfca";
  }
  return "unknown";
}

FcaMethod fca_method_from_string(std::string_view text) {
  for (auto m : {FcaMethod::TwoSfca, FcaMethod::E2sfca, FcaMethod::G2sfca, FcaMethod::M2sfca}) {
    if (to_string(m) == text) return m;
  }
  throw Error("fca", "UnknownMethod", "unknown method '" + std::string(text) + "'");
}

Catchment::Catchment(const Dataset& dataset, const TravelMatrix& matrix, const DecaySpec& decay,
                     unsigned threads)
    : n_demand_(dataset.demand.size()),
      n_supply_(dataset.supply.size()),
      weights_(n_demand_ * n_supply_),
      captured_(n_supply_, 0.0) {
  check_dimensions(dataset, matrix);
  parallel_for(n_demand_, threads, [&](std::size_t i) {
    const auto costs = matrix.row(i);
    for (std::size_t j = 0; j < n_supply_; ++j) weights_[i * n_supply_ + j] = decay(costs[j]);
  });
  // Fixed summation order over k keeps results schedule-independent.
  parallel_for(n_supply_, threads, [&](std::size_t j) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_demand_; ++k) {
      sum += dataset.demand[k].population * weights_[k * n_supply_ + j];
    }
    captured_[j] = sum;
  });
}

std::vector<double> Catchment::supply_ratios(std::span<const double> capacity) const {
  if (capacity.size() != n_supply_) {
    throw Error("fca", "DimensionMismatch", "capacity vector does not match supply count");
  }
  std::vector<double> ratios(n_supply_, 0.0);
  for (std::size_t j = 0; j < n_supply_; ++j) {
    if (captured_[j] > 0.0) ratios[j] = capacity[j] / captured_[j];
  }
  return ratios;
}

std::vector<double> Catchment::scores(FcaMethod method, std::span<const double> capacity,
                                      unsigned threads) const {
  const auto ratios = supply_ratios(capacity);
  std::vector<double> out(n_demand_, 0.0);
  const bool squared = method == FcaMethod::M2sfca;
  parallel_for(n_demand_, threads, [&](std::size_t i) {
    const double* f = weights_.data() + i * n_supply_;
    double sum = 0.0;
    for (std::size_t j = 0; j < n_supply_; ++j) {
      const double w = squared ? f[j] * f[j] : f[j];
      sum += w * ratios[j];
    }
    out[i] = sum;
  });
  return out;
}

std::vector<double> capacities(const Dataset& dataset) {
  std::vector<double> cap;
  cap.reserve(dataset.supply.size());
  for (const auto& s : dataset.supply) cap.push_back(s.capacity);
  return cap;
}

SupplyRatios step1_supply_ratios(const Dataset& dataset, const TravelMatrix& matrix,
                                 const DecaySpec& decay, unsigned threads) {
  const Catchment catchment(dataset, matrix, decay, threads);
  return {catchment.supply_ratios(capacities(dataset)), zero_capture_warnings(dataset, catchment)};
}

AccessibilityResult g2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& decay, unsigned threads) {
  return run(FcaMethod::G2sfca, dataset, matrix, decay, threads);
}

AccessibilityResult two_sfca(const Dataset& dataset, const TravelMatrix& matrix, double d0,
                             unsigned threads) {
  return run(FcaMethod::TwoSfca, dataset, matrix, DecaySpec::binary(d0), threads);
}

AccessibilityResult e2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& zonal_decay, unsigned threads) {
  if (zonal_decay.kind() != DecayKind::Zonal) {
    throw Error("fca", "WrongDecayKind",
                "e2sfca requires zonal decay, got " + std::string(to_string(zonal_decay.kind())));
  }
  return run(FcaMethod::E2sfca, dataset, matrix, zonal_decay, threads);
}

AccessibilityResult m2sfca(const Dataset& dataset, const TravelMatrix& matrix,
                           const DecaySpec& decay, unsigned threads) {
  return run(FcaMethod::M2sfca, dataset, matrix, decay, threads);
}

DecaySpec effective_decay(FcaMethod method, const DecaySpec& decay) {
  if (method == FcaMethod::TwoSfca) return DecaySpec::binary(decay.d0());
  if (method == FcaMethod::E2sfca && decay.kind() != DecayKind::Zonal) {
    throw Error("fca", "WrongDecayKind",
                "e2sfca requires zonal decay, got " + std::string(to_string(decay.kind())));
  }
  return decay;
}

AccessibilityResult compute_accessibility(FcaMethod method, const Dataset& dataset,
                                          const TravelMatrix& matrix, const DecaySpec& decay,
                                          unsigned threads) {
  switch (method) {
    case FcaMethod::TwoSfca: return two_sfca(dataset, matrix, decay.d0(), threads);
    case FcaMethod::E2sfca: return e2sfca(dataset, matrix, decay, threads);
    case FcaMethod::G2sfca: return g2sfca(dataset, matrix, decay, threads);
    case FcaMethod::M2sfca: return m2sfca(dataset, matrix, decay, threads);
  }
  return g2sfca(dataset, matrix, decay, threads);
}

}  // namespace accesskit
