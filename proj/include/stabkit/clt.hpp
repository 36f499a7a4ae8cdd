// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/process.hpp"
#include "stabkit/statistic.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stabkit {

/// Standard normal distribution function.
double normal_cdf(double x);

/// sup_t |F_M(t) - G(t)| for a sorted sample, evaluated at the jumps of the empirical
/// distribution function. cdf_left(x) is G(x-); it defaults to cdf for continuous G.
double kolmogorov_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                           const std::function<double(double)>& cdf_left = {});

/// Dvoretzky-Kiefer-Wolfowitz radius sqrt(log(2/alpha) / (2M)).
double dkw_radius(std::size_t m, double alpha = 0.05);

struct SizeRecord {
  double size = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::vector<double> values;
  std::vector<double> standardized;  // (v - mean) / sqrt(variance), replication order
  double d_k = 0.0;
  double dkw = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
  bool curvature_checked = false;  // needs >= 4 usable points
  double curvature = 0.0;          // quadratic coefficient in log n
  double curvature_se = 0.0;
  bool power_law_rejected = false;
  std::vector<std::string> warnings;
};

struct VarianceScaling {
  std::vector<double> ratios;  // n / Var F_n
  double spread = 0.0;         // max / min over the top half of the grid
  bool bounded = false;
  std::string verdict;
};

struct ExperimentSpec {
  std::string statistic;
  StatisticParams params;
  ProcessConfig process;  // size parameter replaced per grid point
  std::vector<double> grid;
  std::size_t replications = 2000;
  std::uint64_t seed = 0;
  unsigned workers = 1;  // never affects the report
};

struct MonteCarloReport {
  std::string statistic;
  nlohmann::json params;
  nlohmann::json process;
  std::vector<double> grid;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<SizeRecord> records;
  RateFit fit;
  VarianceScaling variance;

  nlohmann::json to_json(bool include_samples = true) const;
  /// Rows "n,mean,var,d_K,dkw_radius".
  void write_csv(std::ostream& out) const;
};

/// Values of the statistic on M clouds at each grid size; replication r at grid point g
/// uses the stream derived from (seed, g, r).
MonteCarloReport run_experiment(const ExperimentSpec& spec);

/// Builds the per-size record from raw values (replication order).
SizeRecord summarize(double size, std::vector<double> values);

/// OLS of log d_K on log n with a quadratic-term check for curvature.
RateFit fit_rate(std::span<const double> sizes, std::span<const double> d_k);
RateFit fit_rate(const MonteCarloReport& report);

VarianceScaling variance_scaling(std::span<const double> sizes, std::span<const double> variances);
VarianceScaling variance_scaling(const MonteCarloReport& report);

}  // namespace stabkit
