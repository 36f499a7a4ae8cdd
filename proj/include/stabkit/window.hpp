// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/box.hpp"
#include "stabkit/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace stabkit {

enum class WindowKind { All, Empty, Ball, Box, BoxIntersectShifted };

/// Region A_x onto which the flexible cost operator restricts a cloud.
class Window {
 public:
  static Window all();
  static Window empty();
  static Window ball(Point center, double radius);
  static Window box(Box box);
  /// outer intersected with the cube of the given side centred at shift.
  static Window box_intersect_shifted(Box outer, Point shift, double side);

  static Window from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  WindowKind kind() const { return kind_; }
  /// Closed membership test.
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& p) const;
  /// Points of the cloud inside the window, original order kept.
  PointCloud restrict(const PointCloud& cloud) const;
  /// Effective box for the box kinds.
  const Box& region() const { return box_; }

 private:
  Window() = default;
  WindowKind kind_ = WindowKind::All;
  Point center_;
  double radius_ = 0.0;
  Box box_;
  Box outer_;
  double side_ = 0.0;
};

}  // namespace stabkit
