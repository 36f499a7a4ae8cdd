// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stabkit {

using Index = Eigen::Index;
using Point = Eigen::VectorXd;

/// Finite ordered point configuration in R^d.
///
/// Points are stored as the columns of a dim x size matrix. Order is part of
/// the value: every statistic breaks distance ties by column index, and
/// insertions append at the end.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(int dim);
  /// Takes ownership of a dim x n coordinate matrix. Throws InvalidInput on non-finite entries.
  explicit PointCloud(Eigen::MatrixXd coords);

  int dim() const noexcept { return dim_; }
  Index size() const noexcept { return coords_.cols(); }
  bool empty() const noexcept { return coords_.cols() == 0; }

  const Eigen::MatrixXd& coords() const noexcept { return coords_; }
  auto point(Index i) const { return coords_.col(i); }

  /// Appends one point; O(size()) since storage is a dense matrix.
  void push_back(const Eigen::Ref<const Eigen::VectorXd>& p);

  /// Copy of this cloud with p appended (it receives index size()).
  PointCloud with(const Eigen::Ref<const Eigen::VectorXd>& p) const;

  /// Sub-cloud of the listed indices, in the listed order.
  PointCloud select(std::span<const Index> indices) const;

  /// Sub-cloud of points satisfying pred, preserving order.
  template <class Pred>
  PointCloud filter(Pred&& pred) const {
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(size()));
    for (Index i = 0; i < size(); ++i) {
      if (pred(coords_.col(i))) keep.push_back(i);
    }
    return select(keep);
  }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.dim_ == b.dim_ && a.coords_.cols() == b.coords_.cols() && a.coords_ == b.coords_;
  }

 private:
  int dim_ = 0;
  Eigen::MatrixXd coords_;
};

/// Squared Euclidean distance; the single distance kernel shared by all modules so
/// that accelerated and brute-force paths agree bit for bit.
template <class A, class B>
inline double squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  double acc = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    acc += t * t;
  }
  return acc;
}

template <class A, class B>
inline double distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return std::sqrt(squared_distance(a, b));
}

/// CSV: one point per row, comma separated, '.' decimal separator, LF endings.
void write_csv(std::ostream& out, const PointCloud& cloud);
PointCloud read_csv(std::istream& in);
PointCloud read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const PointCloud& cloud);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Parses "x1,x2,..." into a point.
Point parse_point(const std::string& text);

}  // namespace stabkit
