// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/box.hpp"
#include "stabkit/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace stabkit {

struct MstEdge {
  Index a, b;  // a < b
  double length;
};

struct MstResult {
  double total_length = 0.0;
  std::vector<MstEdge> edges;

  nlohmann::json to_json() const;
};

/// Kruskal over the complete graph. Edges are ordered by (squared length, a, b) so the tree is unique.
MstResult euclidean_mst(const PointCloud& cloud);

/// MST of the points inside the (closed) box.
MstResult mst_restricted(const PointCloud& cloud, const Box& box);

struct WindowCost {
  double flexible = 0.0;  // D_x F over A_x = B_n intersected with the cube x + n^alpha [-1/2, 1/2]^d
  double full = 0.0;      // D_x F over B_n
  double gap = 0.0;       // |flexible - full|
};

/// Window of side n^alpha about x, clipped to B_n.
Box mst_window(const Box& b_n, const Eigen::Ref<const Eigen::VectorXd>& x, double n, double alpha);

/// Flexible and full add-one costs of the B_n-restricted MST length at x in B_n, alpha in (0,1).
/// n is the side length of B_n = [-n/2, n/2]^d (taken from b_n).
WindowCost mst_window_cost(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x, const Box& b_n,
                           double alpha);

/// Box [-n/2, n/2]^d.
Box centered_box(int dim, double n);

}  // namespace stabkit
