#include "accesskit/decay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accesskit/error.hpp"

namespace accesskit {

namespace {

void require_cutoff(double d0) {
  if (!(std::isfinite(d0) && d0 > 0.0)) {
    throw Error("decay", "InvalidCutoff", "d0 must be a positive finite value");
  }
}

void require_beta(double beta) {
  if (!(std::isfinite(beta) && beta > 0.0)) {
    throw Error("decay", "InvalidBeta", "beta must be a positive finite value");
  }
}

void require_ascending(const std::vector<double>& breakpoints) {
  if (breakpoints.empty()) {
    throw Error("decay", "NonAscendingBreakpoints", "at least one zone breakpoint is required");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(std::isfinite(breakpoints[i]) && breakpoints[i] > 0.0) ||
        (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
      throw Error("decay", "NonAscendingBreakpoints",
                  "zone breakpoints must be positive and strictly ascending");
    }
  }
}

}  // namespace

std::string_view to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::Binary: return "binary";
    case DecayKind::Gaussian: return "gaussian";
    case DecayKind::Exponential: return "exponential";
    case DecayKind::Power: return "power";
    case DecayKind::Zonal: return "zonal";
  }
  return "unknown";
}

DecayKind decay_kind_from_string(std::string_view text) {
  for (auto k : {DecayKind::Binary, DecayKind::Gaussian, DecayKind::Exponential, DecayKind::Power,
                 DecayKind::Zonal}) {
    if (to_string(k) == text) return k;
  }
  throw Error("decay", "UnknownKind", "unknown decay kind '" + std::string(text) + "'");
}

DecaySpec DecaySpec::binary(double d0) {
  require_cutoff(d0);
  DecaySpec spec;
  spec.kind_ = DecayKind::Binary;
  spec.d0_ = d0;
  return spec;
}

DecaySpec DecaySpec::gaussian(double beta, double d0) {
  require_beta(beta);
  require_cutoff(d0);
  DecaySpec spec;
  spec.kind_ = DecayKind::Gaussian;
  spec.beta_ = beta;
  spec.d0_ = d0;
  return spec;
}

DecaySpec DecaySpec::exponential(double beta, double d0) {
  DecaySpec spec = gaussian(beta, d0);
  spec.kind_ = DecayKind::Exponential;
  return spec;
}

DecaySpec DecaySpec::power(double beta, double d0) {
  DecaySpec spec = gaussian(beta, d0);
  spec.kind_ = DecayKind::Power;
  return spec;
}

DecaySpec DecaySpec::zonal(std::vector<double> breakpoints, std::vector<double> weights) {
  require_ascending(breakpoints);
  if (weights.size() != breakpoints.size()) {
    throw Error("decay", "ZoneWeightMismatch", "need exactly one weight per zone");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0 && weights[i] <= 1.0)) {
      throw Error("decay", "InvalidZoneWeight", "zone weights must lie in (0, 1]");
    }
    if (i > 0 && !(weights[i] < weights[i - 1])) {
      throw Error("decay", "InvalidZoneWeight", "zone weights must be strictly decreasing");
    }
  }
  DecaySpec spec;
  spec.kind_ = DecayKind::Zonal;
  spec.d0_ = breakpoints.back();
  spec.breakpoints_ = std::move(breakpoints);
  spec.weights_ = std::move(weights);
  return spec;
}

double DecaySpec::operator()(double d) const {
  if (!(d <= d0_)) return 0.0;  // beyond the catchment, +infinity, NaN
  switch (kind_) {
    case DecayKind::Binary:
      return 1.0;
    case DecayKind::Gaussian:
      return std::exp(-d * d / beta_);
    case DecayKind::Exponential:
      return std::exp(-d / beta_);
    case DecayKind::Power:
      return d <= 0.0 ? 1.0 : std::min(1.0, std::pow(d, -beta_));
    case DecayKind::Zonal: {
      const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), d);
      return weights_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
  }
  return 0.0;
}

DecaySpec zonal_from_gaussian(std::vector<double> breakpoints, double beta) {
  require_ascending(breakpoints);
  require_beta(beta);
  std::vector<double> weights(breakpoints.size());
  const double m1 = breakpoints[0] / 2.0;
  for (std::size_t z = 0; z < breakpoints.size(); ++z) {
    const double lower = z == 0 ? 0.0 : breakpoints[z - 1];
    const double mid = (lower + breakpoints[z]) / 2.0;
    // exp(-m_z^2/beta) / exp(-m_1^2/beta), folded into one exponent
    weights[z] = std::exp(-(mid * mid - m1 * m1) / beta);
  }
  weights[0] = 1.0;
  return DecaySpec::zonal(std::move(breakpoints), std::move(weights));
}

}  // namespace accesskit
