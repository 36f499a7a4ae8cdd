// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/diagnostics.hpp"
#include "stabkit/process.hpp"
#include "stabkit/region.hpp"
#include "stabkit/statistic.hpp"
#include "stabkit/window.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace stabkit {

struct DecayConstants {
  double c2 = 1.0;
  double c3 = 1.0;
};

struct ThetaOptions {
  std::size_t points = 10'000;  // per randomisation
  std::size_t shifts = 10;      // independent random shifts; the standard error comes from their spread
  std::uint64_t seed = 0;
};

/// s * integral of exp(-c2 (p-4)/(4p) (s^{1/d} d(x, K) / 2)^{c3}) Q(dx), by randomised
/// quasi-Monte Carlo (shifted Halton points pushed through the Rosenblatt map of Q).
Estimate theta_bound(const DensitySpec& density, const Region& k, const DecayConstants& decay, double p, double s,
                     const ThetaOptions& options = {});

/// Halton point with the first dim prime bases, index >= 1.
Eigen::VectorXd halton_point(std::uint64_t index, int dim);

struct BEstimate {
  Point x;
  double b1 = 0.0, b2 = 0.0;
  struct Partner {
    Point y;
    double weight = 0.0;  // dQ / d(sampling law)
    double b1 = 0.0, b2 = 0.0;  // at y
    double b3 = 0.0, b4 = 0.0, b5 = 0.0;  // (x, y)
  };
  std::vector<Partner> partners;
};

struct BoundReport {
  std::vector<BEstimate> b_estimates;
  std::array<Estimate, 6> gamma_terms{};
  double theta = 0.0;
  Estimate variance_estimate;

  nlohmann::json to_json() const;
};

struct Theorem31Options {
  std::size_t replications = 500;  // clouds used for every expectation
  std::size_t anchors = 32;        // x ~ Q
  std::size_t partners = 8;        // per anchor, from a defensive mixture near the anchor
  double partner_radius = 4.0;     // ball radius in units of s^{-1/d}
  unsigned workers = 1;
  /// Theta computed for this K; the whole space gives theta = s.
  Region k = Region::full();
  DecayConstants decay;
  double p = 5.0;
};

/// Monte Carlo estimates of b1..b5 and of the six constant-free gamma' terms. The window map
/// gives A_x; an empty map means A_x = the whole space. config must be a Poisson process.
BoundReport theorem31_bound(const StatisticDescriptor& f, const ProcessConfig& config,
                            const std::function<Window(const Point&)>& windows, const Theorem31Options& options = {});

}  // namespace stabkit
