// SPDX-License-Identifier: Apache-2.0
#include "stabkit/diagnostics.hpp"
#include "stabkit/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace stabkit;

namespace {

ProcessConfig unit_square_poisson(double s, std::uint64_t seed) {
  return ProcessConfig::poisson(DensitySpec::uniform_box(Box::unit(2)), s, seed);
}

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("radius tail of the Euler statistic vanishes beyond 2r") {
  StatisticParams ep;
  ep.r = 1.0;
  ep.scale_n = 100.0;
  const auto f = make_statistic("euler", ep);
  const std::vector<double> radii{0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  const auto report = estimate_radius_tail(f, unit_square_poisson(100.0, 1), p2(0.5, 0.5), radii);
  CHECK(report.kind == "radius_decay");
  REQUIRE(report.estimates.size() == radii.size());
  CHECK(report.estimates[0].value > 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] >= 0.2) CHECK(report.estimates[i].value == 0.0);
  }
}

TEST_CASE("radius tail of the cardinality is identically zero") {
  const auto report = estimate_radius_tail(make_statistic("cardinality"), unit_square_poisson(50.0, 2), p2(0.5, 0.5),
                                           {0.0, 0.1, 0.5});
  for (const auto& e : report.estimates) CHECK(e.value == 0.0);
  CHECK(report.degenerate_fit);
}

TEST_CASE("radius tail of the nearest-neighbour length decays") {
  const double s = 200.0;
  StatisticParams kp;
  kp.k = 1;
  kp.scale_n = s;
  const std::vector<double> radii{0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  RadiusTailOptions opt;
  opt.replications = 400;
  const auto report = estimate_radius_tail(make_statistic("knn", kp), unit_square_poisson(s, 3), p2(0.5, 0.5), radii, opt);
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const auto& a = report.estimates[i];
    const auto& b = report.estimates[i + 1];
    CHECK(b.value <= a.value + 2.0 * std::hypot(a.standard_error, b.standard_error));
  }
  CHECK(report.estimates.front().value > 0.0);
  // envelope 6k exp(-c' (s^{1/d} r)^{c3}) with the fitted rate and shape
  REQUIRE_FALSE(report.degenerate_fit);
  const double c = report.fitted_constants.at("c2"), shape = report.fitted_constants.at("c3");
  MESSAGE("fitted tail rate " << c << ", shape " << shape);
  CHECK(c > 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto& e = report.estimates[i];
    CHECK(e.value <= 6.0 * std::exp(-c * std::pow(std::sqrt(s) * radii[i], shape)) + 2.0 * e.standard_error + 1e-12);
  }
  CHECK_THROWS_AS(estimate_radius_tail(make_statistic("knn", kp), unit_square_poisson(s, 3), p2(0.5, 0.5), radii,
                                       RadiusTailOptions{50, 8, 1}),
                  InvalidInput);
}

TEST_CASE("K-exponential probe") {
  const auto config = unit_square_poisson(100.0, 4);
  const auto full = estimate_kexp(make_statistic("cardinality"), config, Region::full(), {0.0, 0.1});
  CHECK(full.trivially_satisfied);

  const auto card = estimate_kexp(make_statistic("cardinality"), config, Region::half_space(0, 0.5), {0.0, 0.2, 0.4});
  for (const auto& e : card.estimates) CHECK(e.value == 1.0);
  for (const auto& e : card.marked_estimates) CHECK(e.value == 1.0);

  StatisticParams mp;
  mp.box = Box(Eigen::Vector2d(0, 0), Eigen::Vector2d(0.5, 1));
  const std::vector<double> distances{0.0, 0.1, 0.2, 0.3};
  const auto mst = estimate_kexp(make_statistic("mst", mp), config, Region::half_space(0, 0.5), distances);
  REQUIRE(mst.estimates.size() == distances.size());
  for (std::size_t i = 0; i + 1 < distances.size(); ++i) {
    const auto& a = mst.estimates[i];
    const auto& b = mst.estimates[i + 1];
    CHECK(b.value <= a.value + 2.0 * std::hypot(a.standard_error, b.standard_error));
  }
  CHECK(mst.estimates[0].value == 1.0);
  CHECK(mst.estimates[1].value == 0.0);
}

TEST_CASE("moment condition") {
  const auto config = unit_square_poisson(100.0, 5);
  const std::vector<Point> grid{p2(0.25, 0.25), p2(0.5, 0.5), p2(0.75, 0.5)};
  const auto card = estimate_moment_sup(make_statistic("cardinality"), config, 5.0, grid);
  CHECK(card.fitted_constants.at("H") == 2.0);
  CHECK(card.fitted_constants.at("H_se") == 0.0);
  CHECK(card.estimates.size() == 6);

  StatisticParams ep;
  ep.r = 1.0;
  ep.scale_n = 100.0;
  const auto euler = estimate_moment_sup(make_statistic("euler", ep), config, 5.0, grid);
  const double h = euler.fitted_constants.at("H");
  CHECK(std::isfinite(h));
  CHECK(h >= 0.0);
  CHECK(h <= euler_moment_bound(2, 1.0, 1.0, 5.0));
  MESSAGE("Euler moment sup " << h << " against the bound " << euler_moment_bound(2, 1.0, 1.0, 5.0));

  CHECK_THROWS_AS(estimate_moment_sup(make_statistic("cardinality"), config, 4.0, grid), InvalidInput);
}

TEST_CASE("moment standard error follows the square-root law") {
  const double s = 100.0;
  StatisticParams ep;
  ep.r = 1.0;
  ep.scale_n = s;
  const auto f = make_statistic("euler", ep);
  const std::vector<Point> grid{p2(0.5, 0.5), p2(0.3, 0.3)};
  MomentOptions small, large;
  small.replications = 500;
  large.replications = 2000;
  const auto a = estimate_moment_sup(f, unit_square_poisson(s, 6), 5.0, grid, small);
  const auto b = estimate_moment_sup(f, unit_square_poisson(s, 6), 5.0, grid, large);
  const double ratio = b.estimates[0].standard_error / a.estimates[0].standard_error;
  MESSAGE("standard error ratio for 4x replications: " << ratio);
  CHECK(ratio >= 0.5 * 0.7);
  CHECK(ratio <= 0.5 * 1.3);
}

TEST_CASE("report JSON") {
  const auto r = estimate_kexp(make_statistic("cardinality"), unit_square_poisson(10.0, 1), Region::full(), {0.0});
  const auto j = r.to_json();
  CHECK(j.at("kind") == "k_exponential");
  CHECK(j.at("trivially_satisfied") == true);
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05));
}
