// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/box.hpp"

#include <nlohmann/json.hpp>

namespace stabkit {

/// Reference set K: the whole space or a half-space slice {x : x[axis] <= threshold}.
struct Region {
  enum class Kind { Full, HalfSpace };
  Kind kind = Kind::Full;
  int axis = 0;
  double threshold = 0.0;

  static Region full() { return {}; }
  static Region half_space(int axis, double threshold) { return {Kind::HalfSpace, axis, threshold}; }

  /// Euclidean distance d(x, K).
  double distance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (kind == Kind::Full) return 0.0;
    return x[axis] > threshold ? x[axis] - threshold : 0.0;
  }

  static Region from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

}  // namespace stabkit
