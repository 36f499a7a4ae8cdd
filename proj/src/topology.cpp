// SPDX-License-Identifier: Apache-2.0
#include "stabkit/topology.hpp"

#include "stabkit/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>

namespace stabkit {

std::string to_string(ComplexKind kind) { return kind == ComplexKind::Cech ? "cech" : "vr"; }

ComplexKind complex_kind_from_string(const std::string& name) {
  if (name == "vr") return ComplexKind::VietorisRips;
  if (name == "cech") return ComplexKind::Cech;
  throw InvalidInput("unknown complex kind '" + name + "' (expected vr or cech)");
}

nlohmann::json SimplexCounts::to_json() const {
  return {{"counts", counts},
          {"complex_kind", to_string(kind)},
          {"filtration_time", filtration_time},
          {"scale", scale},
          {"euler_characteristic", euler_characteristic(*this)}};
}

namespace {

bool within(const PointCloud& cloud, Index i, Index j, double r, double scale) {
  return scale * std::sqrt(squared_distance(cloud.point(i), cloud.point(j))) <= r;
}

void check_graph_args(double r, double scale) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("filtration time r must be positive and finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("scale must be positive and finite");
}

}  // namespace

std::vector<Edge> build_geometric_graph(const PointCloud& cloud, double r, double scale, GraphMethod method) {
  check_graph_args(r, scale);
  const Index n = cloud.size();
  std::vector<Edge> edges;
  if (method == GraphMethod::BruteForce) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (within(cloud, i, j, r, scale)) edges.emplace_back(i, j);
      }
    }
    return edges;
  }
  const int d = cloud.dim();
  const double cell = r / scale;
  using Key = std::vector<long long>;
  std::map<Key, std::vector<Index>> cells;
  std::vector<Key> keys(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Key key(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) key[static_cast<std::size_t>(a)] = static_cast<long long>(std::floor(cloud.point(i)[a] / cell));
    cells[key].push_back(i);
    keys[static_cast<std::size_t>(i)] = std::move(key);
  }
  long long offsets = 1;
  for (int a = 0; a < d; ++a) offsets *= 3;
  for (Index i = 0; i < n; ++i) {
    const Key& base = keys[static_cast<std::size_t>(i)];
    Key probe(base.size());
    for (long long o = 0; o < offsets; ++o) {
      long long rest = o;
      for (int a = 0; a < d; ++a) {
        probe[static_cast<std::size_t>(a)] = base[static_cast<std::size_t>(a)] + (rest % 3) - 1;
        rest /= 3;
      }
      const auto it = cells.find(probe);
      if (it == cells.end()) continue;
      for (Index j : it->second) {
        if (j > i && within(cloud, i, j, r, scale)) edges.emplace_back(i, j);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

std::vector<std::vector<Index>> adjacency(Index n, const std::vector<Edge>& edges) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (const auto& [i, j] : edges) {
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

namespace {

struct Ball {
  Eigen::VectorXd center;
  double radius2 = -1.0;  // negative: empty ball
};

// Smallest ball with all of `boundary` on its sphere, centred in their affine hull.
Ball circumball(const PointCloud& cloud, const std::vector<Index>& boundary) {
  Ball b;
  if (boundary.empty()) return b;
  const Eigen::VectorXd p0 = cloud.point(boundary[0]);
  if (boundary.size() == 1) {
    b.center = p0;
    b.radius2 = 0.0;
    return b;
  }
  const auto m = static_cast<Index>(boundary.size() - 1);
  Eigen::MatrixXd V(cloud.dim(), m);
  for (Index c = 0; c < m; ++c) V.col(c) = cloud.point(boundary[static_cast<std::size_t>(c + 1)]) - p0;
  const Eigen::MatrixXd G = 2.0 * V.transpose() * V;
  const Eigen::VectorXd rhs = V.colwise().squaredNorm().transpose();
  const Eigen::VectorXd lambda = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(G).solve(rhs);
  b.center = p0 + V * lambda;
  b.radius2 = 0.0;
  for (Index i : boundary) b.radius2 = std::max(b.radius2, squared_distance(b.center, cloud.point(i)));
  return b;
}

bool inside(const Ball& b, const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (b.radius2 < 0.0) return false;
  const double d2 = squared_distance(b.center, p);
  return d2 <= b.radius2 * (1.0 + 1e-12) + 1e-300;
}

Ball welzl(const PointCloud& cloud, std::span<const Index> pts, std::vector<Index>& boundary) {
  if (pts.empty() || static_cast<int>(boundary.size()) == cloud.dim() + 1) return circumball(cloud, boundary);
  const Index p = pts.back();
  const auto rest = pts.first(pts.size() - 1);
  Ball b = welzl(cloud, rest, boundary);
  if (inside(b, cloud.point(p))) return b;
  boundary.push_back(p);
  b = welzl(cloud, rest, boundary);
  boundary.pop_back();
  return b;
}

}  // namespace

double miniball_radius(const PointCloud& cloud, std::span<const Index> members) {
  if (members.empty()) return 0.0;
  std::vector<Index> boundary;
  const Ball b = welzl(cloud, members, boundary);
  double r2 = 0.0;
  for (Index i : members) r2 = std::max(r2, squared_distance(b.center, cloud.point(i)));
  return std::sqrt(r2);
}

namespace detail {

std::uint64_t walk_simplices(const PointCloud& cloud, double r, double scale, ComplexKind kind, std::uint64_t budget,
                             const std::function<bool(std::span<const Index>)>& visit, std::size_t* widest_rejected) {
  const Index n = cloud.size();
  if (budget < static_cast<std::uint64_t>(n)) throw InvalidInput("simplex budget must be at least the point count");
  if (n == 0) {
    check_graph_args(r, scale);
    return 0;
  }
  const auto adj = adjacency(n, build_geometric_graph(cloud, r, scale));
  const double cech_limit = 0.5 * r + 1e-9;
  std::uint64_t visited = 0;
  bool stop = false;
  std::vector<Index> simplex;

  std::function<void(const std::vector<Index>&)> extend = [&](const std::vector<Index>& candidates) {
    if (++visited > budget) {
      throw BudgetExceeded("simplex count exceeds the budget of " + std::to_string(budget));
    }
    if (!visit(simplex)) {
      stop = true;
      return;
    }
    for (std::size_t c = 0; c < candidates.size() && !stop; ++c) {
      const Index v = candidates[c];
      simplex.push_back(v);
      if (kind == ComplexKind::Cech && simplex.size() >= 2 && scale * miniball_radius(cloud, simplex) > cech_limit) {
        if (widest_rejected) *widest_rejected = std::max(*widest_rejected, simplex.size());
        simplex.pop_back();
        continue;
      }
      const auto& nv = adj[static_cast<std::size_t>(v)];
      std::vector<Index> next;
      std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1, candidates.end(), nv.begin(),
                            nv.end(), std::back_inserter(next));
      extend(next);
      simplex.pop_back();
    }
  };

  for (Index v = 0; v < n && !stop; ++v) {
    const auto& nv = adj[static_cast<std::size_t>(v)];
    std::vector<Index> candidates(std::upper_bound(nv.begin(), nv.end(), v), nv.end());
    simplex.assign(1, v);
    extend(candidates);
  }
  return visited;
}

}  // namespace detail

SimplexCounts simplex_counts(const PointCloud& cloud, double r, double scale, ComplexKind kind,
                             std::uint64_t budget) {
  SimplexCounts out;
  out.kind = kind;
  out.filtration_time = r;
  out.scale = scale;
  std::size_t widest_rejected = 0;
  detail::walk_simplices(
      cloud, r, scale, kind, budget,
      [&](std::span<const Index> s) {
        if (out.counts.size() < s.size()) out.counts.resize(s.size(), 0);
        ++out.counts[s.size() - 1];
        return true;
      },
      &widest_rejected);
  // Cech: keep a zero entry for every clique size the miniball test rejected
  if (out.counts.size() < widest_rejected) out.counts.resize(widest_rejected, 0);
  return out;
}

SimplexCounts vr_counts(const PointCloud& cloud, double r, double scale, std::uint64_t budget) {
  return simplex_counts(cloud, r, scale, ComplexKind::VietorisRips, budget);
}

SimplexCounts cech_counts(const PointCloud& cloud, double r, double scale, std::uint64_t budget) {
  return simplex_counts(cloud, r, scale, ComplexKind::Cech, budget);
}

std::int64_t euler_characteristic(const SimplexCounts& counts) {
  std::int64_t chi = 0;
  for (std::size_t k = 0; k < counts.counts.size(); ++k) chi += (k % 2 == 0 ? 1 : -1) * counts.counts[k];
  return chi;
}

double euler_statistic(const PointCloud& cloud, double r, ComplexKind kind, double n_for_scale, double max_time,
                       std::uint64_t budget) {
  if (!(r > 0.0) || r > max_time) {
    throw InvalidInput("filtration time must lie in (0, " + format_double(max_time) + "]");
  }
  const double n = n_for_scale > 0.0 ? n_for_scale : static_cast<double>(std::max<Index>(cloud.size(), 1));
  const double scale = std::pow(n, 1.0 / std::max(cloud.dim(), 1));
  return static_cast<double>(euler_characteristic(simplex_counts(cloud, r, scale, kind, budget)));
}

}  // namespace stabkit
