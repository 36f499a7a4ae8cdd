// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stabkit/point_cloud.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stabkit {

enum class ComplexKind { VietorisRips, Cech };

std::string to_string(ComplexKind kind);
ComplexKind complex_kind_from_string(const std::string& name);

inline constexpr std::uint64_t kDefaultSimplexBudget = 10'000'000;

/// Number of simplices per dimension; counts[0] is the vertex count. For Cech the list runs up to
/// the largest Rips clique the miniball test rejected, so trailing entries may be zero.
struct SimplexCounts {
  std::vector<std::int64_t> counts;
  ComplexKind kind = ComplexKind::VietorisRips;
  double filtration_time = 0.0;
  double scale = 1.0;

  nlohmann::json to_json() const;
};

using Edge = std::pair<Index, Index>;

enum class GraphMethod { Grid, BruteForce };

/// Edges {i < j} with scale * |x_i - x_j| <= r, sorted lexicographically.
std::vector<Edge> build_geometric_graph(const PointCloud& cloud, double r, double scale,
                                        GraphMethod method = GraphMethod::Grid);

/// Sorted adjacency lists of the geometric graph.
std::vector<std::vector<Index>> adjacency(Index n, const std::vector<Edge>& edges);

/// Radius of the smallest ball enclosing the listed points (Welzl's algorithm, exact up to roundoff).
double miniball_radius(const PointCloud& cloud, std::span<const Index> members);

/// Clique counts of the geometric graph (Vietoris-Rips complex).
SimplexCounts vr_counts(const PointCloud& cloud, double r, double scale,
                        std::uint64_t budget = kDefaultSimplexBudget);

/// Cech complex: cliques whose scaled miniball radius is at most r/2 + 1e-9.
SimplexCounts cech_counts(const PointCloud& cloud, double r, double scale,
                          std::uint64_t budget = kDefaultSimplexBudget);

SimplexCounts simplex_counts(const PointCloud& cloud, double r, double scale, ComplexKind kind,
                             std::uint64_t budget = kDefaultSimplexBudget);

/// Alternating sum of the counts.
std::int64_t euler_characteristic(const SimplexCounts& counts);

/// Visits every simplex (as a sorted vertex list) of the complex; enumeration order is deterministic.
/// Returning false from the visitor stops the walk.
template <class Visitor>
void for_each_simplex(const PointCloud& cloud, double r, double scale, ComplexKind kind, std::uint64_t budget,
                      Visitor&& visit);

/// chi of the complex at time r on the cloud scaled by n^{1/d}; n_for_scale <= 0 uses the cloud size.
/// Requires 0 < r <= max_time.
double euler_statistic(const PointCloud& cloud, double r, ComplexKind kind, double n_for_scale = 0.0,
                       double max_time = 2.0, std::uint64_t budget = kDefaultSimplexBudget);

namespace detail {
std::uint64_t walk_simplices(const PointCloud& cloud, double r, double scale, ComplexKind kind, std::uint64_t budget,
                             const std::function<bool(std::span<const Index>)>& visit,
                             std::size_t* widest_rejected = nullptr);
}

template <class Visitor>
void for_each_simplex(const PointCloud& cloud, double r, double scale, ComplexKind kind, std::uint64_t budget,
                      Visitor&& visit) {
  detail::walk_simplices(cloud, r, scale, kind, budget, std::forward<Visitor>(visit));
}

}  // namespace stabkit
