// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "stabkit/error.hpp"
#include "stabkit/knn.hpp"
#include "stabkit/process.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace stabkit;

namespace {

PointCloud line(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(1, static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) m(0, i++) = x;
  return PointCloud(m);
}

PointCloud random_cloud(int dim, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_points(DensitySpec::uniform_box(Box::unit(dim)), n, rng);
}

}  // namespace

TEST_CASE("two points are mutual nearest neighbours") {
  const auto c = line({0.0, 1.0});
  const auto g = build_knn_graph(c, 1);
  REQUIRE(g.neighbors[0].size() == 1);
  CHECK(g.neighbors[0][0].target == 1);
  CHECK(g.neighbors[0][0].mutual);
  CHECK(g.neighbors[1][0].mutual);
  CHECK(knn_score(0, g, 1.0) == 0.5);
  CHECK(knn_score(1, g, 1.0) == 0.5);
  CHECK(total_edge_length(c, 1, 1.0) == 1.0);
}

TEST_CASE("collinear 0, 1, 3") {
  const auto c = line({0.0, 1.0, 3.0});
  const auto g = build_knn_graph(c, 1);
  CHECK(g.neighbors[0][0].target == 1);
  CHECK(g.neighbors[0][0].mutual);
  CHECK(g.neighbors[1][0].target == 0);
  CHECK(g.neighbors[2][0].target == 1);
  CHECK_FALSE(g.neighbors[2][0].mutual);
  CHECK(knn_score(0, g, 1.0) == 0.5);
  CHECK(knn_score(1, g, 1.0) == 0.5);
  CHECK(knn_score(2, g, 1.0) == 2.0);
  CHECK(total_edge_length(c, 1, 1.0) == 3.0);
  CHECK(undirected_edges(g).size() == 2);
}

TEST_CASE("degenerate sizes") {
  const auto one = line({0.5});
  CHECK(knn_score(0, build_knn_graph(one, 3), 1.0) == 0.0);
  CHECK(total_edge_length(PointCloud(2), 1, 1.0) == 0.0);
  CHECK_THROWS_AS(build_knn_graph(PointCloud(2), 1), InvalidInput);
  const auto three = line({0.0, 1.0, 3.0});
  const auto g = build_knn_graph(three, 5);
  for (const auto& list : g.neighbors) CHECK(list.size() == 2);
}

TEST_CASE("index breaks distance ties") {
  const auto c = line({0.0, -1.0, 1.0});
  const auto g = build_knn_graph(c, 1);
  CHECK(g.neighbors[0][0].target == 1);
  const auto b = build_knn_graph(c, 1, KnnMethod::BruteForce);
  CHECK(b.neighbors[0][0].target == 1);
}

TEST_CASE("kd-tree search equals exhaustive search") {
  for (int t = 0; t < 50; ++t) {
    const int dim = 1 + t % 3;
    const Index n = 2 + (t * 37) % 199;
    const int k = 1 + t % 6;
    const auto c = random_cloud(dim, n, 1000 + static_cast<std::uint64_t>(t));
    const auto g = build_knn_graph(c, k, KnnMethod::KdTree);
    const auto b = build_knn_graph(c, k, KnnMethod::BruteForce);
    for (Index i = 0; i < n; ++i) {
      const auto want = oracle::knn_by_sort(c, i, k);
      const auto& got = g.neighbors[static_cast<std::size_t>(i)];
      REQUIRE(got.size() == want.size());
      for (std::size_t j = 0; j < want.size(); ++j) {
        CHECK(got[j].target == want[j]);
        CHECK(b.neighbors[static_cast<std::size_t>(i)][j].target == want[j]);
        CHECK(got[j].distance == b.neighbors[static_cast<std::size_t>(i)][j].distance);
        if (j > 0) CHECK(got[j].distance >= got[j - 1].distance);
      }
    }
  }
}

TEST_CASE("mutual flags are symmetric and the total counts each edge once") {
  for (int t = 0; t < 20; ++t) {
    const auto c = random_cloud(2, 60, 50 + static_cast<std::uint64_t>(t));
    const int k = 1 + t % 4;
    const auto g = build_knn_graph(c, k);
    for (Index i = 0; i < c.size(); ++i) {
      for (const auto& e : g.neighbors[static_cast<std::size_t>(i)]) {
        for (const auto& back : g.neighbors[static_cast<std::size_t>(e.target)]) {
          if (back.target == i) {
            CHECK(back.mutual == e.mutual);
            CHECK(e.mutual);
          }
        }
      }
    }
    double by_edges = 0.0;
    for (const auto& [a, b] : undirected_edges(g)) by_edges += std::pow(distance(c.point(a), c.point(b)), 1.5);
    CHECK(total_edge_length(c, k, 1.5) == doctest::Approx(by_edges).epsilon(1e-12));
  }
}

TEST_CASE("distance scaling multiplies the length") {
  const auto c = random_cloud(2, 100, 3);
  CHECK(total_edge_length(c, 2, 1.0, 10.0) == doctest::Approx(10.0 * total_edge_length(c, 2, 1.0)).epsilon(1e-12));
  CHECK(total_edge_length(c, 2, 2.0, 10.0) == doctest::Approx(100.0 * total_edge_length(c, 2, 2.0)).epsilon(1e-12));
}

TEST_CASE("six-triangle radius") {
  // two points per sector on the bisector, at distances 1 and 2
  Eigen::MatrixXd m(2, 12);
  for (int j = 0; j < 6; ++j) {
    const double a = (30.0 + 60.0 * j) * M_PI / 180.0;
    for (int l = 0; l < 2; ++l) {
      m(0, 2 * j + l) = (l + 1) * std::cos(a);
      m(1, 2 * j + l) = (l + 1) * std::sin(a);
    }
  }
  const PointCloud c(m);
  const Eigen::Vector2d x(0, 0);
  // a bisector point at distance h lies in T_j(t) once t * sqrt(3) / 2 >= h
  CHECK(six_triangle_radius(c, x, 1) == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::isinf(six_triangle_radius(c, x, 2)));
  CHECK(std::isinf(six_triangle_radius(PointCloud(2), x, 1)));
  CHECK_THROWS_AS(six_triangle_radius(line({0.0, 1.0}), Eigen::VectorXd::Zero(1), 1), Unsupported);
}

TEST_CASE("six-triangle radius is monotone in k and dominated by the k-th neighbour") {
  const auto c = random_cloud(2, 400, 8);
  const Eigen::Vector2d x(0.5, 0.5);
  double prev = 0.0;
  for (int k = 1; k < 5; ++k) {
    const double r = six_triangle_radius(c, x, k);
    CHECK(r >= prev);
    prev = r;
    // T_j(R) lies inside the ball of radius R and holds k+1 points
    Index inside = 0;
    for (Index i = 0; i < c.size(); ++i) inside += distance(c.point(i), x) <= r;
    CHECK(inside >= k + 1);
  }
}

TEST_CASE("graph CSV export") {
  std::ostringstream os;
  write_graph_csv(os, build_knn_graph(line({0.0, 1.0, 3.0}), 1));
  CHECK(os.str() == "i,j,rank,distance,mutual\n0,1,1,1,1\n1,0,1,1,1\n2,1,1,2,0\n");
}
