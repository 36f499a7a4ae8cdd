// SPDX-License-Identifier: Apache-2.0
#include "stabkit/mst.hpp"

#include "stabkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace stabkit {

nlohmann::json MstResult::to_json() const {
  nlohmann::json edge_list = nlohmann::json::array();
  for (const auto& e : edges) edge_list.push_back({e.a, e.b, e.length});
  return {{"total_length", total_length}, {"edges", edge_list}};
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    auto& ra = rank_[static_cast<std::size_t>(a)];
    auto& rb = rank_[static_cast<std::size_t>(b)];
    if (ra < rb) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    if (ra == rb) ++rank_[static_cast<std::size_t>(a)];
    return true;
  }

 private:
  std::vector<Index> parent_;
  std::vector<int> rank_;
};

}  // namespace

MstResult euclidean_mst(const PointCloud& cloud) {
  MstResult out;
  const Index n = cloud.size();
  if (n < 2) return out;
  struct Candidate {
    double d2;
    Index a, b;
  };
  std::vector<Candidate> cand;
  cand.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) cand.push_back({squared_distance(cloud.point(a), cloud.point(b)), a, b});
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.d2, x.a, x.b) < std::tie(y.d2, y.a, y.b);
  });
  DisjointSets sets(n);
  out.edges.reserve(static_cast<std::size_t>(n - 1));
  for (const auto& c : cand) {
    if (!sets.unite(c.a, c.b)) continue;
    const double len = std::sqrt(c.d2);
    out.edges.push_back({c.a, c.b, len});
    out.total_length += len;
    if (static_cast<Index>(out.edges.size()) == n - 1) break;
  }
  return out;
}

MstResult mst_restricted(const PointCloud& cloud, const Box& box) {
  if (box.dim() != cloud.dim() && !cloud.empty()) throw InvalidInput("box dimension does not match the cloud");
  return euclidean_mst(cloud.filter([&](const auto& p) { return box.contains(p); }));
}

Box centered_box(int dim, double n) {
  if (!(n > 0.0)) throw InvalidInput("box side must be positive");
  return Box(Eigen::VectorXd::Constant(dim, -0.5 * n), Eigen::VectorXd::Constant(dim, 0.5 * n));
}

Box mst_window(const Box& b_n, const Eigen::Ref<const Eigen::VectorXd>& x, double n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("window exponent alpha must lie in (0, 1)");
  return b_n.intersect(Box::cube(x, std::pow(n, alpha)));
}

WindowCost mst_window_cost(const PointCloud& cloud, const Eigen::Ref<const Eigen::VectorXd>& x, const Box& b_n,
                           double alpha) {
  if (!b_n.contains(x)) throw InvalidInput("x must lie inside B_n");
  const double n = b_n.hi[0] - b_n.lo[0];
  const Box window = mst_window(b_n, x, n, alpha);
  const PointCloud inner = cloud.filter([&](const auto& p) { return window.contains(p); });
  const PointCloud full = cloud.filter([&](const auto& p) { return b_n.contains(p); });
  WindowCost out;
  out.flexible = euclidean_mst(inner.with(x)).total_length - euclidean_mst(inner).total_length;
  out.full = euclidean_mst(full.with(x)).total_length - euclidean_mst(full).total_length;
  out.gap = std::fabs(out.flexible - out.full);
  return out;
}

}  // namespace stabkit
