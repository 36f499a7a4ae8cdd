// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/point_cloud.hpp"
#include "stabkit/statistic.hpp"
#include "stabkit/window.hpp"

#include <optional>

namespace stabkit {

/// D_x F = F(cloud + x) - F(cloud); x receives the last index.
double add_one_cost(const StatisticDescriptor& f, const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x);

/// D_x F^y = F(cloud + y + x) - F(cloud + y). Without y this is add_one_cost.
double add_one_cost_marked(const StatisticDescriptor& f, const PointCloud& cloud,
                           const Eigen::Ref<const Eigen::VectorXd>& x, const std::optional<Point>& y);

/// D_{x1,x2} F; x1 == x2 is rejected.
double second_order_cost(const StatisticDescriptor& f, const PointCloud& cloud,
                         const Eigen::Ref<const Eigen::VectorXd>& x1, const Eigen::Ref<const Eigen::VectorXd>& x2);

/// D_x F evaluated on the restriction of the cloud to the window.
double flexible_cost(const StatisticDescriptor& f, const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Window& window);

struct IdentityCheck {
  bool pass = false;
  double residual = 0.0;
  double lhs = 0.0;  // D_{x1,x2} F
  double rhs = 0.0;  // D_{x1} F^{x2} - D_{x1} F
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kScoreTolerance = 1e-9;

/// Compares D_{x1,x2} F with D_{x1} F^{x2} - D_{x1} F, each side from its own evaluations.
IdentityCheck check_second_order_identity(const StatisticDescriptor& f, const PointCloud& cloud,
                                          const Eigen::Ref<const Eigen::VectorXd>& x1,
                                          const Eigen::Ref<const Eigen::VectorXd>& x2);

/// |D_x F - (f(x, cloud + x) + sum_y [f(y, cloud + x) - f(y, cloud)])|; Unsupported without scores.
double check_score_decomposition(const StatisticDescriptor& f, const PointCloud& cloud,
                                 const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace stabkit
