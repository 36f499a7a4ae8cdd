// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/box.hpp"
#include "stabkit/entropy.hpp"
#include "stabkit/point_cloud.hpp"
#include "stabkit/topology.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stabkit {

/// A functional F on finite point clouds with optional stabilisation metadata.
struct StatisticDescriptor {
  std::string name;
  /// F on a nonempty cloud.
  std::function<double(const PointCloud&)> evaluate;
  /// F of the empty configuration.
  double empty_value = 0.0;
  /// Human-readable stabilisation radius, e.g. "2r".
  std::optional<std::string> radius_formula;
  /// Known strong-stabilisation radius at x for the cloud (unscaled coordinates), if any.
  std::function<double(const PointCloud&, const Eigen::Ref<const Eigen::VectorXd>&)> radius;
  /// All per-point scores f(X_i, cloud), summing to F; empty when F has no score decomposition.
  std::function<std::vector<double>(const PointCloud&)> scores;

  /// F(cloud), with F(empty) = empty_value.
  double operator()(const PointCloud& cloud) const { return cloud.empty() ? empty_value : evaluate(cloud); }
  bool has_score() const { return static_cast<bool>(scores); }
  /// The score of one point; Unsupported when no decomposition exists.
  double score(Index i, const PointCloud& cloud) const;
};

/// Parameters shared by the built-in statistics; unused fields are ignored.
struct StatisticParams {
  int k = 1;           // knn, entropy
  double theta = 1.0;  // knn edge exponent
  double r = 1.0;      // euler filtration time
  ComplexKind complex = ComplexKind::VietorisRips;
  double max_time = 2.0;  // euler: admissible r <= max_time
  std::uint64_t budget = kDefaultSimplexBudget;
  /// Distances of knn and euler are multiplied by scale_n^{1/d}; 1 leaves them unscaled.
  double scale_n = 1.0;
  /// Thermodynamic scaling by the size parameter inside rate experiments.
  bool thermodynamic = true;
  /// Entropy weights: "kl", "auto" (minimum-norm member of W^k) or a JSON file path.
  std::string weights = "kl";
  /// MST restriction box, if any.
  std::optional<Box> box;

  static StatisticParams from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Built-in statistics: cardinality, coord_sum, knn, entropy, euler, mst, superdiffusive.
StatisticDescriptor make_statistic(const std::string& name, const StatisticParams& params = {});

/// Names accepted by make_statistic.
const std::vector<std::string>& statistic_names();

/// Statistic for a rate experiment at the given size parameter (applies thermodynamic scaling).
StatisticDescriptor make_statistic_for_size(const std::string& name, const StatisticParams& params, double size);

/// a F + b G, with the score decomposition when both carry one.
StatisticDescriptor linear_combination(const StatisticDescriptor& f, double a, const StatisticDescriptor& g, double b);

}  // namespace stabkit
