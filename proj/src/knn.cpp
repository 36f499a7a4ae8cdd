// SPDX-License-Identifier: Apache-2.0
#include "stabkit/knn.hpp"

#include "stabkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <array>

namespace stabkit {

namespace {

using Candidate = std::pair<double, Index>;

double box_squared_distance(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            const Eigen::Ref<const Eigen::VectorXd>& q) {
  double acc = 0.0;
  for (Index a = 0; a < q.size(); ++a) {
    double t = 0.0;
    if (q[a] < lo[a]) {
      t = lo[a] - q[a];
    } else if (q[a] > hi[a]) {
      t = q[a] - hi[a];
    }
    acc += t * t;
  }
  return acc;
}

}  // namespace

KdTree::KdTree(const PointCloud& cloud, Index leaf_size) : cloud_(&cloud), leaf_size_(std::max<Index>(1, leaf_size)) {
  order_.resize(static_cast<std::size_t>(cloud.size()));
  for (Index i = 0; i < cloud.size(); ++i) order_[static_cast<std::size_t>(i)] = i;
  if (cloud.size() > 0) {
    nodes_.reserve(static_cast<std::size_t>(2 * cloud.size() / leaf_size_ + 2));
    build(0, cloud.size());
  }
}

Index KdTree::build(Index begin, Index end) {
  const auto& m = cloud_->coords();
  Node node{begin, end, -1, -1, m.col(order_[static_cast<std::size_t>(begin)]),
            m.col(order_[static_cast<std::size_t>(begin)])};
  for (Index i = begin + 1; i < end; ++i) {
    node.lo = node.lo.cwiseMin(m.col(order_[static_cast<std::size_t>(i)]));
    node.hi = node.hi.cwiseMax(m.col(order_[static_cast<std::size_t>(i)]));
  }
  const auto id = static_cast<Index>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size_) return id;
  Index axis = 0;
  (node.hi - node.lo).maxCoeff(&axis);
  if (node.hi[axis] == node.lo[axis]) return id;  // all points coincide
  const Index mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](Index a, Index b) { return m(axis, a) < m(axis, b); });
  const Index left = build(begin, mid);
  const Index right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

std::vector<Candidate> KdTree::nearest(const Eigen::Ref<const Eigen::VectorXd>& q, int k, Index exclude) const {
  std::vector<Candidate> heap;  // max-heap on (d2, index)
  if (k <= 0 || nodes_.empty()) return heap;
  heap.reserve(static_cast<std::size_t>(k) + 1);
  const auto& m = cloud_->coords();
  const auto full = [&] { return static_cast<int>(heap.size()) == k; };

  auto visit = [&](auto&& self, Index id) -> void {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    // Strict comparison: a box at exactly the worst distance may still hold a smaller index.
    if (full() && box_squared_distance(node.lo, node.hi, q) > heap.front().first) return;
    if (node.left < 0) {
      for (Index p = node.begin; p < node.end; ++p) {
        const Index i = order_[static_cast<std::size_t>(p)];
        if (i == exclude) continue;
        const Candidate c{squared_distance(m.col(i), q), i};
        if (!full()) {
          heap.push_back(c);
          std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = c;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    const double dl = box_squared_distance(l.lo, l.hi, q);
    const double dr = box_squared_distance(r.lo, r.hi, q);
    if (dl <= dr) {
      self(self, node.left);
      self(self, node.right);
    } else {
      self(self, node.right);
      self(self, node.left);
    }
  };
  visit(visit, 0);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

std::vector<Candidate> brute_force_nearest(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                                           Index exclude) {
  std::vector<Candidate> all;
  all.reserve(static_cast<std::size_t>(cloud.size()));
  for (Index i = 0; i < cloud.size(); ++i) {
    if (i != exclude) all.emplace_back(squared_distance(cloud.point(i), q), i);
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
  all.resize(take);
  return all;
}

KnnGraph build_knn_graph(const PointCloud& cloud, int k, KnnMethod method) {
  if (k < 1) throw InvalidInput("k must be positive");
  if (cloud.empty()) throw InvalidInput("build_knn_graph needs a nonempty cloud");
  KnnGraph g;
  g.k = k;
  g.neighbors.resize(static_cast<std::size_t>(cloud.size()));
  const int kk = static_cast<int>(std::min<Index>(k, cloud.size() - 1));
  std::vector<std::vector<Candidate>> lists(static_cast<std::size_t>(cloud.size()));
  if (method == KnnMethod::KdTree) {
    const KdTree tree(cloud);
    for (Index i = 0; i < cloud.size(); ++i) lists[static_cast<std::size_t>(i)] = tree.nearest(cloud.point(i), kk, i);
  } else {
    for (Index i = 0; i < cloud.size(); ++i) {
      lists[static_cast<std::size_t>(i)] = brute_force_nearest(cloud, cloud.point(i), kk, i);
    }
  }
  // Membership sets for the reverse test.
  std::vector<std::vector<Index>> members(lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (const auto& c : lists[i]) members[i].push_back(c.second);
    std::sort(members[i].begin(), members[i].end());
  }
  for (std::size_t i = 0; i < lists.size(); ++i) {
    auto& out = g.neighbors[i];
    out.reserve(lists[i].size());
    for (const auto& [d2, j] : lists[i]) {
      const auto& back = members[static_cast<std::size_t>(j)];
      const bool mutual = std::binary_search(back.begin(), back.end(), static_cast<Index>(i));
      out.push_back({j, std::sqrt(d2), mutual});
    }
  }
  return g;
}

double knn_score(Index i, const KnnGraph& graph, double theta, double scale) {
  double s = 0.0;
  for (const auto& e : graph.neighbors[static_cast<std::size_t>(i)]) {
    const double w = std::pow(scale * e.distance, theta);
    s += e.mutual ? 0.5 * w : w;
  }
  return s;
}

double total_edge_length(const PointCloud& cloud, int k, double theta, double scale) {
  if (cloud.empty()) return 0.0;
  const auto g = build_knn_graph(cloud, k);
  double total = 0.0;
  for (Index i = 0; i < g.size(); ++i) total += knn_score(i, g, theta, scale);
  return total;
}

std::vector<std::pair<Index, Index>> undirected_edges(const KnnGraph& graph) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < graph.size(); ++i) {
    for (const auto& e : graph.neighbors[static_cast<std::size_t>(i)]) {
      edges.emplace_back(std::min(i, e.target), std::max(i, e.target));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double six_triangle_radius(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
  if (cloud.dim() != 2 || x.size() != 2) throw Unsupported("six_triangle_radius is defined for d = 2 only");
  if (k < 1) throw InvalidInput("k must be positive");
  constexpr double kSector = std::numbers::pi / 3.0;
  const double height = std::sqrt(3.0) / 2.0;
  // Edge length of the smallest triangle T_j(t) containing a point: its projection on
  // the sector bisector divided by the triangle height ratio.
  std::array<std::vector<double>, 6> reach;
  for (Index i = 0; i < cloud.size(); ++i) {
    const double vx = cloud.coords()(0, i) - x[0];
    const double vy = cloud.coords()(1, i) - x[1];
    if (vx == 0.0 && vy == 0.0) {
      for (auto& r : reach) r.push_back(0.0);
      continue;
    }
    double ang = std::atan2(vy, vx);
    if (ang < 0.0) ang += 2.0 * std::numbers::pi;
    const double pos = ang / kSector;
    const int j = std::min(5, static_cast<int>(std::floor(pos)));
    auto add = [&](int sector) {
      const double bis = (sector + 0.5) * kSector;
      const double proj = vx * std::cos(bis) + vy * std::sin(bis);
      reach[static_cast<std::size_t>(sector)].push_back(proj / height);
    };
    add(j);
    // Boundary rays belong to both neighbouring triangles.
    if (pos == std::floor(pos)) add((j + 5) % 6);
  }
  double radius = 0.0;
  for (auto& r : reach) {
    if (static_cast<int>(r.size()) < k + 1) return std::numeric_limits<double>::infinity();
    std::nth_element(r.begin(), r.begin() + k, r.end());
    radius = std::max(radius, r[static_cast<std::size_t>(k)]);
  }
  return radius;
}

void write_graph_csv(std::ostream& out, const KnnGraph& graph) {
  out << "i,j,rank,distance,mutual\n";
  for (Index i = 0; i < graph.size(); ++i) {
    int rank = 0;
    for (const auto& e : graph.neighbors[static_cast<std::size_t>(i)]) {
      out << i << ',' << e.target << ',' << ++rank << ',' << format_double(e.distance) << ',' << (e.mutual ? 1 : 0)
          << '\n';
    }
  }
}

}  // namespace stabkit
