// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "stabkit/bounds.hpp"
#include "stabkit/clt.hpp"
#include "stabkit/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace stabkit;

namespace {

DensitySpec unit_square() { return DensitySpec::uniform_box(Box::unit(2)); }

}  // namespace

TEST_CASE("Halton points") {
  const auto h1 = halton_point(1, 3);
  CHECK(h1[0] == 0.5);
  CHECK(h1[1] == doctest::Approx(1.0 / 3.0));
  CHECK(h1[2] == doctest::Approx(0.2));
  const auto h5 = halton_point(5, 2);
  CHECK(h5[0] == doctest::Approx(0.625));
  CHECK(h5[1] == doctest::Approx(7.0 / 9.0));
}

TEST_CASE("theta with K = everything is s") {
  for (double s : {1.0, 10.0, 123.5}) {
    const auto t = theta_bound(unit_square(), Region::full(), {}, 5.0, s);
    CHECK(t.value == s);
    CHECK(t.standard_error == 0.0);
  }
}

TEST_CASE("theta for the half box matches the one-dimensional integral") {
  for (double s : {10.0, 100.0}) {
    for (double c2 : {0.5, 1.0, 3.0}) {
      const auto t = theta_bound(unit_square(), Region::half_space(0, 0.5), {c2, 1.0}, 5.0, s);
      const double want = s * oracle::half_box_theta_over_s(c2, 5.0, s);
      MESSAGE("s = " << s << " c2 = " << c2 << ": " << t.value << " vs " << want << " (se " << t.standard_error << ")");
      CHECK(std::fabs(t.value - want) <= 1e-4 * want);
    }
  }
}

TEST_CASE("theta is non-decreasing in s") {
  double last = 0.0;
  for (double s : {5.0, 20.0, 80.0, 320.0, 1280.0}) {
    const double t = theta_bound(unit_square(), Region::half_space(1, 0.3), {1.0, 2.0}, 6.0, s).value;
    CHECK(t >= last);
    last = t;
  }
}

TEST_CASE("theta preconditions") {
  CHECK_THROWS_AS(theta_bound(unit_square(), Region::half_space(0, 0.5), {}, 4.0, 10.0), InvalidInput);
  CHECK_THROWS_AS(theta_bound(unit_square(), Region::half_space(0, 0.5), {-1.0, 1.0}, 5.0, 10.0), InvalidInput);
}

TEST_CASE("cardinality gamma terms against the Poisson values") {
  for (double s : {100.0, 400.0}) {
    const auto config = ProcessConfig::poisson(unit_square(), s, 17);
    const auto report = theorem31_bound(make_statistic("cardinality"), config, {});
    const double want[6] = {0.0, 0.0, 1.0 / std::sqrt(s), (2.0 * std::sqrt(s) + std::pow(s, 0.25)) / s, 1.0 / std::sqrt(s), 0.0};
    for (int j = 0; j < 6; ++j) {
      const auto& g = report.gamma_terms[static_cast<std::size_t>(j)];
      MESSAGE("s = " << s << " gamma " << j + 1 << ": " << g.value << " +- " << g.standard_error << " (analytic " << want[j] << ")");
      CHECK(std::fabs(g.value - want[j]) <= 3.0 * g.standard_error + 1e-12);
    }
    CHECK(report.theta == s);
    for (const auto& b : report.b_estimates) {
      CHECK(b.b1 == 0.0);
      CHECK(b.b2 == 1.0);
      for (const auto& y : b.partners) {
        if (y.weight > 0.0) CHECK(y.b2 == 1.0);
        CHECK(y.b3 == 0.0);
        CHECK(y.b4 == 0.0);
        CHECK(y.b5 == 0.0);
      }
    }
  }
}

TEST_CASE("whole-space windows give zero window discrepancies") {
  StatisticParams kp;
  kp.scale_n = 50.0;
  Theorem31Options opt;
  opt.anchors = 4;
  opt.partners = 2;
  const auto config = ProcessConfig::poisson(unit_square(), 50.0, 3);
  const auto report = theorem31_bound(make_statistic("knn", kp), config, [](const Point&) { return Window::all(); }, opt);
  for (const auto& b : report.b_estimates) {
    CHECK(b.b1 == 0.0);
    for (const auto& y : b.partners) {
      CHECK(y.b1 == 0.0);
      CHECK(y.b3 == 0.0);
      CHECK(y.b4 == 0.0);
    }
  }
  const auto j = report.to_json();
  CHECK(j.at("gamma_terms").size() == 6);
  CHECK(j.contains("variance_estimate"));
}

TEST_CASE("k-NN gamma total scales like s^{-1/2}") {
  std::vector<double> sizes{100.0, 200.0, 400.0}, totals;
  Theorem31Options opt;
  opt.anchors = 16;
  opt.partners = 4;
  for (double s : sizes) {
    StatisticParams kp;
    kp.scale_n = s;
    const auto report = theorem31_bound(make_statistic("knn", kp), ProcessConfig::poisson(unit_square(), s, 23), {}, opt);
    double total = 0.0;
    for (const auto& g : report.gamma_terms) {
      CHECK(std::isfinite(g.value));
      total += g.value;
    }
    MESSAGE("s = " << s << " gamma total " << total);
    totals.push_back(total);
  }
  const auto fit = fit_rate(sizes, totals);
  MESSAGE("slope " << fit.slope);
  CHECK(std::fabs(fit.slope + 0.5) <= 0.15);
}

TEST_CASE("bound preconditions") {
  const auto binomial = ProcessConfig::binomial(unit_square(), 50, 1);
  CHECK_THROWS_AS(theorem31_bound(make_statistic("cardinality"), binomial, {}), InvalidInput);
  Theorem31Options few;
  few.replications = 100;
  CHECK_THROWS_AS(theorem31_bound(make_statistic("cardinality"), ProcessConfig::poisson(unit_square(), 50, 1), {}, few),
                  InvalidInput);
}
