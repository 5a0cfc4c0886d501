#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace accesskit {

enum class DecayKind { Binary, Gaussian, Exponential, Power, Zonal };

std::string_view to_string(DecayKind kind);
DecayKind decay_kind_from_string(std::string_view text);

// Distance-decay function f(d): nonincreasing, valued in [0, 1], zero beyond
// the catchment cutoff d0 and at +infinity. Instances are only created
// through the validating factories below.
class DecaySpec {
 public:
  static DecaySpec binary(double d0);
  // exp(-d^2 / beta)
  static DecaySpec gaussian(double beta, double d0);
  // exp(-d / beta)
  static DecaySpec exponential(double beta, double d0);
  // min(1, d^-beta), f(0) = 1
  static DecaySpec power(double beta, double d0);
  // Zone z covers (b_{z-1}, b_z] (zone 1 is [0, b_1]) and has weight w_z.
  // Breakpoints strictly ascending, weights strictly decreasing in (0, 1].
  // The cutoff is the last breakpoint.
  static DecaySpec zonal(std::vector<double> breakpoints, std::vector<double> weights);

  DecayKind kind() const noexcept { return kind_; }
  double d0() const noexcept { return d0_; }
  // Rate parameter; 0 for binary and zonal specs.
  double beta() const noexcept { return beta_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> weights() const noexcept { return weights_; }

  double operator()(double d) const;

 private:
  DecaySpec() = default;

  DecayKind kind_ = DecayKind::Binary;
  double d0_ = 0.0;
  double beta_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> weights_;
};

inline double evaluate_decay(const DecaySpec& spec, double d) { return spec(d); }

// Zonal decay whose zone weights are Gaussian values at the zone midpoints,
// normalized so the first zone has weight 1.
DecaySpec zonal_from_gaussian(std::vector<double> breakpoints, double beta);

}  // namespace accesskit
