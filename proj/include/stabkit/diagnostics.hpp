// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/process.hpp"
#include "stabkit/region.hpp"
#include "stabkit/statistic.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace stabkit {

inline constexpr double kZeroTolerance = 1e-12;

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Empirical check of one stabilisation assumption.
struct AssumptionReport {
  std::string kind;            // "radius_decay", "k_exponential" or "moment"
  std::vector<double> grid;    // radii or distances; for moments the index of the (x, x*) pair
  std::vector<Estimate> estimates;
  std::vector<Estimate> marked_estimates;  // k_exponential: P(D_x F^{x*} != 0); moment: per-term split
  std::map<std::string, double> fitted_constants;
  bool degenerate_fit = false;
  bool trivially_satisfied = false;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Binomial standard error sqrt(p (1 - p) / m).
double binomial_se(double p, std::size_t m);

struct RadiusTailOptions {
  std::size_t replications = 200;
  std::size_t probes = 8;
  unsigned workers = 1;
};

/// For each r, the fraction of replications in which some probe configuration A, drawn from the
/// same process and kept outside B_x(r), changes D_x F(cloud within B_x(r)). Fits
/// log p = log c1 - c2 (s^{1/d} r)^{c3} with c3 chosen from {0.5, 1, d/2, d}.
AssumptionReport estimate_radius_tail(const StatisticDescriptor& f, const ProcessConfig& config,
                                      const Eigen::Ref<const Eigen::VectorXd>& x, const std::vector<double>& radii,
                                      const RadiusTailOptions& options = {});

/// Least-squares fit of log p against -(scale r)^{c3}; degenerate when fewer than two positive points.
void fit_tail(AssumptionReport& report, double scale, int dim, const std::string& prefix);

struct KexpOptions {
  std::size_t replications = 200;
  unsigned workers = 1;
};

/// P(|D_x F| > 1e-12) and P(|D_x F^{x*}| > 1e-12) with x* ~ Q, at points x along the axis of K at the
/// given distances from K (other coordinates at the support centre). K = full is trivially satisfied.
AssumptionReport estimate_kexp(const StatisticDescriptor& f, const ProcessConfig& config, const Region& k,
                               const std::vector<double>& distances, const KexpOptions& options = {});

struct MomentOptions {
  std::size_t replications = 200;
  unsigned workers = 1;
};

/// max over pairs (x, x*) of distinct grid points of E|D_x F|^p + E|D_x F^{x*}|^p, p > 4.
AssumptionReport estimate_moment_sup(const StatisticDescriptor& f, const ProcessConfig& config, double p,
                                     const std::vector<Point>& x_grid, const MomentOptions& options = {});

/// Upper bound (1 + 2^p) exp(V_d sup q r^d (2^p - 1)) on E|D_x chi|^p + E|D_x chi^{x*}|^p for the
/// thermodynamically scaled Vietoris-Rips Euler characteristic.
double euler_moment_bound(int dim, double r, double sup_density, double p);

}  // namespace stabkit
