// SPDX-License-Identifier: Apache-2.0
#include "stabkit/entropy.hpp"

#include "stabkit/error.hpp"
#include "stabkit/knn.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace stabkit {

double digamma_at_integer(int j) {
  if (j < 1) throw InvalidInput("digamma_at_integer needs j >= 1");
  double h = 0.0;
  for (int i = 1; i < j; ++i) h += 1.0 / i;
  return -kEulerMascheroni + h;
}

std::vector<int> weight_support(int k, int d) {
  if (k < 1 || d < 1) throw InvalidInput("k and d must be positive");
  if (k / d < 1) throw Infeasible("weight support needs floor(k/d) >= 1 (k >= d)");
  std::vector<int> s;
  for (int j = 1; j <= d; ++j) s.push_back(j * k / d);
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double gamma_moment_ratio(int j, int l, int d) {
  return std::exp(std::lgamma(j + 2.0 * l / d) - std::lgamma(static_cast<double>(j)));
}

void compute_residuals(WeightVector& w) {
  double sum = 0.0;
  for (double v : w.weights) sum += v;
  w.sum_residual = std::fabs(sum - 1.0);
  w.moment_residuals.clear();
  for (int l = 1; l <= w.dim / 4; ++l) {
    double m = 0.0;
    for (int j = 1; j <= w.k; ++j) {
      const double v = w.weights[static_cast<std::size_t>(j - 1)];
      if (v != 0.0) m += v * gamma_moment_ratio(j, l, w.dim);
    }
    w.moment_residuals.push_back(std::fabs(m));
  }
}

WeightVector WeightVector::indicator(int k, int dim) {
  if (k < 1 || dim < 1) throw InvalidInput("k and d must be positive");
  WeightVector w;
  w.k = k;
  w.dim = dim;
  w.weights.assign(static_cast<std::size_t>(k), 0.0);
  w.weights.back() = 1.0;
  w.support_set = {k};
  compute_residuals(w);
  return w;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  if (cod.rank() < A.rows()) {
    throw Infeasible("constraint matrix is rank deficient (rank " + std::to_string(cod.rank()) + " < " +
                     std::to_string(A.rows()) + " rows)");
  }
  Eigen::VectorXd x = cod.solve(b);
  // One step of iterative refinement; the correction stays in the row space.
  const Eigen::VectorXd r = b - A * x;
  x += cod.solve(r);
  return x;
}

WeightVector solve_weights(int k, int d) {
  if (d < 1 || d > 6) throw InvalidInput("solve_weights supports 1 <= d <= 6");
  if (k < d) throw Infeasible("solve_weights needs k >= d so that floor(k/d) >= 1");
  WeightVector w;
  w.k = k;
  w.dim = d;
  w.support_set = weight_support(k, d);
  w.weights.assign(static_cast<std::size_t>(k), 0.0);
  const auto m = static_cast<Eigen::Index>(w.support_set.size());
  const int moments = d / 4;
  if (moments == 0) {
    // Projection of the origin onto {sum w = 1} over the support is the uniform vector.
    for (int j : w.support_set) w.weights[static_cast<std::size_t>(j - 1)] = 1.0 / static_cast<double>(m);
  } else {
    if (m < 1 + moments) {
      throw Infeasible("support of size " + std::to_string(m) + " cannot meet " + std::to_string(1 + moments) +
                       " constraints");
    }
    Eigen::MatrixXd A(1 + moments, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(1 + moments);
    b[0] = 1.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      const int j = w.support_set[static_cast<std::size_t>(c)];
      A(0, c) = 1.0;
      for (int l = 1; l <= moments; ++l) A(l, c) = gamma_moment_ratio(j, l, d);
    }
    const Eigen::VectorXd x = min_norm_solve(A, b);
    for (Eigen::Index c = 0; c < m; ++c) {
      w.weights[static_cast<std::size_t>(w.support_set[static_cast<std::size_t>(c)] - 1)] = x[c];
    }
  }
  compute_residuals(w);
  return w;
}

nlohmann::json WeightVector::to_json() const {
  return {{"k", k},
          {"dim", dim},
          {"weights", weights},
          {"support_set", support_set},
          {"residuals", {{"sum_to_one", sum_residual}, {"gamma_moments", moment_residuals}}}};
}

WeightVector WeightVector::from_json(const nlohmann::json& doc) {
  WeightVector w;
  try {
    w.k = doc.at("k").get<int>();
    w.dim = doc.at("dim").get<int>();
    w.weights = doc.at("weights").get<std::vector<double>>();
    if (doc.contains("support_set")) w.support_set = doc.at("support_set").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("weight vector: ") + e.what());
  }
  if (static_cast<int>(w.weights.size()) != w.k) throw ConfigError("weight vector length must equal k");
  if (w.support_set.empty()) {
    for (int j = 1; j <= w.k; ++j) {
      if (w.weights[static_cast<std::size_t>(j - 1)] != 0.0) w.support_set.push_back(j);
    }
  }
  compute_residuals(w);
  return w;
}

Eigen::MatrixXd knn_distance_table(const PointCloud& cloud, int k) {
  const Index n = cloud.size();
  if (n < k + 1) throw InvalidInput("entropy estimators need n >= k + 1");
  const KdTree tree(cloud);
  Eigen::MatrixXd rho(n, k);
  for (Index i = 0; i < n; ++i) {
    const auto nn = tree.nearest(cloud.point(i), k, i);
    for (int j = 0; j < k; ++j) rho(i, j) = std::sqrt(nn[static_cast<std::size_t>(j)].first);
  }
  return rho;
}

namespace {

double log_term(double rho, Index n, int d, double log_vd, int j) {
  if (!(rho > 0.0)) throw Degenerate("zero nearest-neighbour distance (duplicate points)");
  return std::log(static_cast<double>(n - 1)) + log_vd + d * std::log(rho) - digamma_at_integer(j);
}

void check_weights(const WeightVector& w, int k) {
  if (w.k != k || static_cast<int>(w.weights.size()) != k) throw InvalidInput("weight vector k does not match");
}

}  // namespace

EntropyEstimate kl_entropy(const PointCloud& cloud, int k) {
  if (k < 1) throw InvalidInput("k must be positive");
  const Eigen::MatrixXd rho = knn_distance_table(cloud, k);
  const Index n = cloud.size();
  const double log_vd = std::log(unit_ball_volume(cloud.dim()));
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += log_term(rho(i, k - 1), n, cloud.dim(), log_vd, k);
  std::vector<double> w(static_cast<std::size_t>(k), 0.0);
  w.back() = 1.0;
  return {acc / static_cast<double>(n), k, std::move(w), n};
}

EntropyEstimate weighted_entropy(const PointCloud& cloud, int k, const WeightVector& w) {
  if (k < 1) throw InvalidInput("k must be positive");
  check_weights(w, k);
  const Eigen::MatrixXd rho = knn_distance_table(cloud, k);
  const Index n = cloud.size();
  const double log_vd = std::log(unit_ball_volume(cloud.dim()));
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    double inner = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double wj = w.weights[static_cast<std::size_t>(j - 1)];
      if (wj != 0.0) inner += wj * log_term(rho(i, j - 1), n, cloud.dim(), log_vd, j);
    }
    acc += inner;
  }
  return {acc / static_cast<double>(n), k, w.weights, n};
}

double entropy_score(Index i, const PointCloud& cloud, const WeightVector& w) {
  const Index n = cloud.size();
  const int k = w.k;
  if (n < k + 1) throw InvalidInput("entropy estimators need n >= k + 1");
  const auto nn = brute_force_nearest(cloud, cloud.point(i), k, i);
  const double log_vd = std::log(unit_ball_volume(cloud.dim()));
  double inner = 0.0;
  for (int j = 1; j <= k; ++j) {
    const double wj = w.weights[static_cast<std::size_t>(j - 1)];
    if (wj != 0.0) inner += wj * log_term(std::sqrt(nn[static_cast<std::size_t>(j - 1)].first), n, cloud.dim(), log_vd, j);
  }
  return inner / static_cast<double>(n);
}

}  // namespace stabkit
