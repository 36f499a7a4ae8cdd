// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace stabkit {

/// Closed axis-aligned box [lo, hi] in R^d.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lo_, Eigen::VectorXd hi_);
  static Box unit(int dim);
  /// Cube centred at c with the given side.
  static Box cube(const Eigen::Ref<const Eigen::VectorXd>& center, double side);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const { return (hi - lo).prod(); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }

  template <class P>
  bool contains(const Eigen::MatrixBase<P>& p) const {
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
  }

  /// Intersection; an empty intersection has some lo > hi.
  Box intersect(const Box& other) const;
  bool is_empty() const { return (lo.array() > hi.array()).any(); }

  friend bool operator==(const Box& a, const Box& b) { return a.lo == b.lo && a.hi == b.hi; }
};

}  // namespace stabkit
