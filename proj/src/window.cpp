// SPDX-License-Identifier: Apache-2.0
#include "stabkit/window.hpp"

#include "stabkit/error.hpp"

#include <cmath>

namespace stabkit {

Window Window::all() { return Window(); }

Window Window::empty() {
  Window w;
  w.kind_ = WindowKind::Empty;
  return w;
}

Window Window::ball(Point center, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw InvalidInput("ball window radius must be finite and >= 0");
  Window w;
  w.kind_ = WindowKind::Ball;
  w.center_ = std::move(center);
  w.radius_ = radius;
  return w;
}

Window Window::box(Box box) {
  Window w;
  w.kind_ = WindowKind::Box;
  w.box_ = std::move(box);
  return w;
}

Window Window::box_intersect_shifted(Box outer, Point shift, double side) {
  if (!(side > 0.0)) throw InvalidInput("window side must be positive");
  if (outer.dim() != shift.size()) throw InvalidInput("window shift dimension does not match the box");
  Window w;
  w.kind_ = WindowKind::BoxIntersectShifted;
  w.box_ = outer.intersect(Box::cube(shift, side));
  w.center_ = std::move(shift);
  w.outer_ = std::move(outer);
  w.side_ = side;
  return w;
}

bool Window::contains(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  switch (kind_) {
    case WindowKind::All:
      return true;
    case WindowKind::Empty:
      return false;
    case WindowKind::Ball:
      if (p.size() != center_.size()) throw InvalidInput("window dimension does not match the point");
      return squared_distance(p, center_) <= radius_ * radius_;
    case WindowKind::Box:
    case WindowKind::BoxIntersectShifted:
      if (p.size() != box_.lo.size()) throw InvalidInput("window dimension does not match the point");
      return box_.contains(p);
  }
  return false;
}

PointCloud Window::restrict(const PointCloud& cloud) const {
  if (kind_ == WindowKind::All) return cloud;
  if (kind_ == WindowKind::Empty) return PointCloud(cloud.dim());
  return cloud.filter([&](const auto& p) { return contains(p); });
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Point from_vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size())); }

}  // namespace

nlohmann::json Window::to_json() const {
  switch (kind_) {
    case WindowKind::All:
      return {{"kind", "all"}};
    case WindowKind::Empty:
      return {{"kind", "empty"}};
    case WindowKind::Ball:
      return {{"kind", "ball"}, {"center", to_vec(center_)}, {"radius", radius_}};
    case WindowKind::Box:
      return {{"kind", "box"}, {"lo", to_vec(box_.lo)}, {"hi", to_vec(box_.hi)}};
    case WindowKind::BoxIntersectShifted:
      return {{"kind", "box_intersect_shifted"},
              {"outer", {{"lo", to_vec(outer_.lo)}, {"hi", to_vec(outer_.hi)}}},
              {"shift", to_vec(center_)},
              {"side", side_}};
  }
  return {};
}

Window Window::from_json(const nlohmann::json& doc) {
  try {
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "all") return all();
    if (kind == "empty") return empty();
    if (kind == "ball") return ball(from_vec(doc.at("center").get<std::vector<double>>()), doc.at("radius").get<double>());
    if (kind == "box") {
      return box(Box(from_vec(doc.at("lo").get<std::vector<double>>()), from_vec(doc.at("hi").get<std::vector<double>>())));
    }
    if (kind == "box_intersect_shifted") {
      const auto& outer = doc.at("outer");
      return box_intersect_shifted(
          Box(from_vec(outer.at("lo").get<std::vector<double>>()), from_vec(outer.at("hi").get<std::vector<double>>())),
          from_vec(doc.at("shift").get<std::vector<double>>()), doc.at("side").get<double>());
    }
    throw ConfigError("unknown window kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("window: ") + e.what());
  }
}

}  // namespace stabkit
