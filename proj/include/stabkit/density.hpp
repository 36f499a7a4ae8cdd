// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/box.hpp"
#include "stabkit/random.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <string>
#include <vector>

namespace stabkit {

enum class DensityKind { UniformBox, PiecewiseConstantGrid, TruncatedProductBeta };

std::string to_string(DensityKind kind);

/// Per-axis law of a truncated product-beta density: Beta(alpha, beta) on [0,1],
/// truncated to [u_lo, u_hi] and mapped affinely onto the support interval.
struct BetaAxis {
  double alpha = 1.0;
  double beta = 1.0;
  double u_lo = 0.0;
  double u_hi = 1.0;
};

/// A probability density Q on an axis-aligned box, with a declared upper bound
/// sup_density >= q everywhere (the kappa of the ball-growth condition, omega = dim).
class DensitySpec {
 public:
  static DensitySpec uniform_box(Box support);
  /// values: density per cell, flattened with the last axis fastest.
  static DensitySpec grid(Box support, std::vector<int> shape, std::vector<double> values, double sup_density);
  static DensitySpec product_beta(Box support, std::vector<BetaAxis> axes, double sup_density);

  /// {"kind": "...", "support": [[lo,hi],...], "params": {...}, "sup_density": x}
  static DensitySpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  DensityKind kind() const { return kind_; }
  const Box& support() const { return support_; }
  int dim() const { return support_.dim(); }
  double sup_density() const { return sup_density_; }
  /// Largest exact value of q (<= sup_density).
  double max_density() const;

  double pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// One draw from Q: per-axis inverse CDF for product kinds, rejection against sup_density otherwise.
  Eigen::VectorXd sample(Rng& rng) const;

  /// Rosenblatt transform [0,1)^d -> support (sequential conditional inverse CDFs).
  Eigen::VectorXd transform_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Q(B_center(radius)). Exact for d <= 2 on piecewise-constant kinds, adaptive quadrature otherwise.
  double ball_mass(const Eigen::Ref<const Eigen::VectorXd>& center, double radius) const;

  /// Q(box) exactly.
  double box_mass(const Box& box) const;

 /// Empty placeholder; every factory returns a validated spec.
  DensitySpec() = default;

 private:
  void validate() const;

  double axis_pdf(int axis, double x) const;
  double axis_cdf(int axis, double x) const;
  double axis_quantile(int axis, double p) const;
  double piece_ball_integral(const Eigen::Ref<const Eigen::VectorXd>& c, double radius, const Box& piece,
                             bool constant) const;
  Eigen::VectorXd grid_cell_lo(std::size_t flat) const;

  DensityKind kind_ = DensityKind::UniformBox;
  Box support_;
  double sup_density_ = 0.0;
  // grid
  std::vector<int> shape_;
  std::vector<double> values_;
  std::vector<std::vector<double>> prefix_mass_;  // prefix_mass_[l][flat index over axes 0..l]
  // product beta
  std::vector<BetaAxis> axes_;
  std::vector<double> axis_cdf_lo_, axis_cdf_span_;
};

/// Area of the disk of radius r about (cx, cy) intersected with [x0,x1] x [y0,y1].
double disk_rectangle_area(double cx, double cy, double r, double x0, double x1, double y0, double y1);

/// Volume of the unit Euclidean ball in R^d: pi^{d/2} / Gamma(1 + d/2).
double unit_ball_volume(int d);

}  // namespace stabkit
