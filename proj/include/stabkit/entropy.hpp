// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/density.hpp"  // unit_ball_volume
#include "stabkit/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <vector>

namespace stabkit {

inline constexpr double kEulerMascheroni = 0.57721566490153286060651209008240243;

/// Psi(j) = -gamma + sum_{i<j} 1/i, j >= 1.
double digamma_at_integer(int j);

/// Entropy weights w in W^k: sum-to-one, vanishing Gamma moments
/// sum_j w_j Gamma(j + 2l/d)/Gamma(j) = 0 for l = 1..floor(d/4), support {floor(jk/d)}.
struct WeightVector {
  int k = 1;
  int dim = 1;
  std::vector<double> weights;  // weights[j-1] = w_j
  std::vector<int> support_set; // sorted, deduplicated, 1-based
  double sum_residual = 0.0;    // |sum w - 1|
  std::vector<double> moment_residuals;  // one per l = 1..floor(d/4)

  /// Indicator weight at j = k (the unweighted Kozachenko-Leonenko estimator).
  static WeightVector indicator(int k, int dim);

  nlohmann::json to_json() const;
  static WeightVector from_json(const nlohmann::json& doc);
};

/// {floor(k/d), floor(2k/d), ..., k}, deduplicated. Throws Infeasible when floor(k/d) < 1.
std::vector<int> weight_support(int k, int d);

/// Gamma(j + 2l/d) / Gamma(j), evaluated in log space.
double gamma_moment_ratio(int j, int l, int d);

/// Recomputes the residual fields of w from its weights.
void compute_residuals(WeightVector& w);

/// Minimum Euclidean norm solution of the underdetermined system A w = b (full row rank required).
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// The minimum-norm member of W^k.
WeightVector solve_weights(int k, int d);

struct EntropyEstimate {
  double value = 0.0;  // nats
  int k = 1;
  std::vector<double> weights;
  Index n = 0;
};

/// Distances rho_{j,i}, j = 1..k, for every point (exact k-NN). rows = n, cols = k.
Eigen::MatrixXd knn_distance_table(const PointCloud& cloud, int k);

/// (1/n) sum_i log((n-1) V_d rho_{k,i}^d / e^{Psi(k)}).
EntropyEstimate kl_entropy(const PointCloud& cloud, int k);

/// sum_i (1/n) sum_j w_j log((n-1) V_d rho_{j,i}^d / e^{Psi(j)}).
EntropyEstimate weighted_entropy(const PointCloud& cloud, int k, const WeightVector& w);

/// Per-point score f_n^w(X_i, cloud) of the weighted estimator.
double entropy_score(Index i, const PointCloud& cloud, const WeightVector& w);

}  // namespace stabkit
