// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/density.hpp"
#include "stabkit/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace stabkit {

enum class ProcessMode { Poisson, Binomial };

/// A Poisson process with intensity measure s*Q, or a binomial process of n i.i.d. Q-points.
struct ProcessConfig {
  DensitySpec density;
  ProcessMode mode = ProcessMode::Poisson;
  double intensity = 1.0;  // s, Poisson mode
  Index n = 1;             // binomial mode
  std::uint64_t seed = 0;

  static ProcessConfig poisson(DensitySpec density, double s, std::uint64_t seed);
  static ProcessConfig binomial(DensitySpec density, Index n, std::uint64_t seed);

  /// s for Poisson mode, n for binomial mode: the size parameter of every rate statement.
  double size_parameter() const { return mode == ProcessMode::Poisson ? intensity : static_cast<double>(n); }
  /// Same process family with its size parameter replaced.
  ProcessConfig with_size(double size) const;

  /// {"mode": "poisson", "intensity": s} or {"mode": "binomial", "n": n}; density and seed alongside.
  static ProcessConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Poisson(s Q(support)) many i.i.d. Q-points; deterministic in (seed, seed_offset).
PointCloud sample_poisson(const ProcessConfig& config, std::uint64_t seed_offset);
/// Exactly n i.i.d. Q-points; an n = 0 request yields the empty cloud.
PointCloud sample_binomial(const ProcessConfig& config, std::uint64_t seed_offset);
/// Dispatch on config.mode.
PointCloud sample_process(const ProcessConfig& config, std::uint64_t seed_offset);

/// Draws count i.i.d. Q-points from rng.
PointCloud sample_points(const DensitySpec& density, Index count, Rng& rng);

}  // namespace stabkit
