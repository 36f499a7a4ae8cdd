// SPDX-License-Identifier: Apache-2.0
#include "stabkit/cost_operators.hpp"

#include "stabkit/error.hpp"

#include <cmath>

namespace stabkit {

namespace {

void check_dim(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (cloud.dim() != 0 && x.size() != cloud.dim()) throw InvalidInput("point dimension does not match the cloud");
}

PointCloud adopt_dim(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (cloud.dim() == 0) return PointCloud(static_cast<int>(x.size()));
  return cloud;
}

}  // namespace

double add_one_cost(const StatisticDescriptor& f, const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dim(cloud, x);
  const PointCloud base = adopt_dim(cloud, x);
  return f(base.with(x)) - f(base);
}

double add_one_cost_marked(const StatisticDescriptor& f, const PointCloud& cloud,
                           const Eigen::Ref<const Eigen::VectorXd>& x, const std::optional<Point>& y) {
  if (!y) return add_one_cost(f, cloud, x);
  check_dim(cloud, *y);
  return add_one_cost(f, adopt_dim(cloud, x).with(*y), x);
}

double second_order_cost(const StatisticDescriptor& f, const PointCloud& cloud,
                         const Eigen::Ref<const Eigen::VectorXd>& x1, const Eigen::Ref<const Eigen::VectorXd>& x2) {
  check_dim(cloud, x1);
  check_dim(cloud, x2);
  if (x1.size() == x2.size() && x1 == x2) throw InvalidInput("second-order cost needs x1 != x2");
  const PointCloud base = adopt_dim(cloud, x1);
  const PointCloud with1 = base.with(x1);
  return f(with1.with(x2)) - f(with1) - f(base.with(x2)) + f(base);
}

double flexible_cost(const StatisticDescriptor& f, const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Window& window) {
  check_dim(cloud, x);
  return add_one_cost(f, window.restrict(adopt_dim(cloud, x)), x);
}

IdentityCheck check_second_order_identity(const StatisticDescriptor& f, const PointCloud& cloud,
                                          const Eigen::Ref<const Eigen::VectorXd>& x1,
                                          const Eigen::Ref<const Eigen::VectorXd>& x2) {
  IdentityCheck out;
  out.lhs = second_order_cost(f, cloud, x1, x2);
  out.rhs = add_one_cost_marked(f, cloud, x1, Point(x2)) - add_one_cost(f, cloud, x1);
  out.residual = std::fabs(out.lhs - out.rhs);
  out.pass = out.residual <= kIdentityTolerance;
  return out;
}

double check_score_decomposition(const StatisticDescriptor& f, const PointCloud& cloud,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!f.has_score()) throw Unsupported("statistic '" + f.name + "' has no score decomposition");
  check_dim(cloud, x);
  const PointCloud base = adopt_dim(cloud, x);
  const PointCloud plus = base.with(x);
  const double dx = f(plus) - f(base);
  const auto after = f.scores(plus);
  const auto before = base.empty() ? std::vector<double>{} : f.scores(base);
  double rhs = after.back();
  for (std::size_t i = 0; i < before.size(); ++i) rhs += after[i] - before[i];
  return std::fabs(dx - rhs);
}

}  // namespace stabkit
