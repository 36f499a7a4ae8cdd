// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/point_cloud.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace stabkit {

/// Exact k-nearest-neighbour search. Candidates are ordered by (distance, index),
/// so results match brute force bit for bit.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud, Index leaf_size = 8);

  /// Up to k pairs (squared distance, index) ascending; `exclude` (if >= 0) is skipped.
  std::vector<std::pair<double, Index>> nearest(const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                                                Index exclude = -1) const;

 private:
  struct Node {
    Index begin, end;       // range in order_
    Index left = -1, right = -1;
    Eigen::VectorXd lo, hi;  // bounding box of the range
  };
  Index build(Index begin, Index end);

  const PointCloud* cloud_;
  Index leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

/// O(n) scan with the same ordering contract as KdTree::nearest.
std::vector<std::pair<double, Index>> brute_force_nearest(const PointCloud& cloud,
                                                          const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                                                          Index exclude = -1);

struct KnnEdge {
  Index target;
  double distance;
  bool mutual;  // the reverse relation also holds within k
};

/// Directed k-NN relation: neighbors[i] lists the j-nearest neighbours of i, j = 1..min(k, n-1).
struct KnnGraph {
  int k = 1;
  std::vector<std::vector<KnnEdge>> neighbors;

  Index size() const { return static_cast<Index>(neighbors.size()); }
};

enum class KnnMethod { KdTree, BruteForce };

/// k >= n truncates every list to n-1 entries.
KnnGraph build_knn_graph(const PointCloud& cloud, int k, KnnMethod method = KnnMethod::KdTree);

/// Score of point i: half of (scale*d)^theta over mutual edges, the full term over
/// non-mutual edges i -> m. Summed over points, each undirected edge counts once.
double knn_score(Index i, const KnnGraph& graph, double theta, double scale = 1.0);

/// Total edge length of the undirected k-NN graph with edge weights (scale*d)^theta; 0 for the empty cloud.
double total_edge_length(const PointCloud& cloud, int k, double theta, double scale = 1.0);

/// Undirected edge set {i < m} of the k-NN graph.
std::vector<std::pair<Index, Index>> undirected_edges(const KnnGraph& graph);

/// Smallest t such that each of the six 60-degree triangles with apex x and side t
/// holds at least k+1 cloud points; +infinity if some sector never fills. The
/// stabilisation radius of the edge-length statistic is 4 times this value. d = 2 only.
double six_triangle_radius(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x, int k);

/// CSV rows "i,j,rank,distance,mutual" (rank is 1-based).
void write_graph_csv(std::ostream& out, const KnnGraph& graph);

}  // namespace stabkit
