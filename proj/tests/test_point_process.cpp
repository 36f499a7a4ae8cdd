// SPDX-License-Identifier: Apache-2.0
#include "stabkit/density.hpp"
#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/process.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace stabkit;

namespace {

DensitySpec unit_square() { return DensitySpec::uniform_box(Box::unit(2)); }

DensitySpec sample_grid() {
  // 2 x 2 cells on [0,1]^2, masses 0.1, 0.2, 0.3, 0.4 (cell area 1/4)
  return DensitySpec::grid(Box::unit(2), {2, 2}, {0.4, 0.8, 1.2, 1.6}, 1.6);
}

DensitySpec sample_beta() {
  return DensitySpec::product_beta(Box::unit(2), {{2.0, 3.0, 0.0, 1.0}, {1.0, 1.0, 0.2, 0.9}}, 2.0 / 0.7);
}

}  // namespace

TEST_CASE("poisson count mean at unit intensity") {
  const auto cfg = ProcessConfig::poisson(unit_square(), 1.0, 11);
  const std::size_t m = 100000;
  double sum = 0.0;
  for (std::size_t r = 0; r < m; ++r) sum += static_cast<double>(sample_poisson(cfg, r).size());
  const double mean = sum / static_cast<double>(m);
  CHECK(mean >= 0.98);
  CHECK(mean <= 1.02);
  CHECK(std::fabs(mean - 1.0) <= 4.0 * std::sqrt(1.0 / static_cast<double>(m)));
}

TEST_CASE("poisson count dispersion at s = 50") {
  const auto cfg = ProcessConfig::poisson(unit_square(), 50.0, 12);
  const std::size_t m = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const auto n = static_cast<double>(sample_poisson(cfg, r).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / static_cast<double>(m);
  const double var = (sum2 - static_cast<double>(m) * mean * mean) / static_cast<double>(m - 1);
  CHECK(var / mean >= 0.9);
  CHECK(var / mean <= 1.1);
  CHECK(std::fabs(mean - 50.0) <= 4.0 * std::sqrt(50.0 / static_cast<double>(m)));
}

TEST_CASE("identical seeds give bit-identical clouds") {
  const auto cfg = ProcessConfig::poisson(sample_beta(), 30.0, 99);
  CHECK(sample_poisson(cfg, 5) == sample_poisson(cfg, 5));
  CHECK_FALSE(sample_poisson(cfg, 5) == sample_poisson(cfg, 6));
  const auto bin = ProcessConfig::binomial(sample_grid(), 3, 4);
  CHECK(sample_binomial(bin, 0) == sample_binomial(bin, 0));
  CHECK(sample_binomial(bin, 0).size() == 3);
}

TEST_CASE("sampling is independent of the worker count") {
  const auto cfg = ProcessConfig::poisson(sample_grid(), 40.0, 3);
  std::vector<PointCloud> one(64), many(64);
  parallel_for(64, 1, [&](std::size_t r) { one[r] = sample_process(cfg, r); });
  parallel_for(64, 8, [&](std::size_t r) { many[r] = sample_process(cfg, r); });
  for (std::size_t r = 0; r < 64; ++r) CHECK(one[r] == many[r]);
}

TEST_CASE("binomial sampler") {
  const auto one = sample_binomial(ProcessConfig::binomial(DensitySpec::uniform_box(Box::unit(1)), 1, 2), 0);
  REQUIRE(one.size() == 1);
  CHECK(one.point(0)[0] >= 0.0);
  CHECK(one.point(0)[0] <= 1.0);

  CHECK(sample_binomial(ProcessConfig::binomial(unit_square(), 0, 2), 0).empty());

  const auto big = sample_binomial(ProcessConfig::binomial(unit_square(), 10000, 8), 0);
  Index left = 0;
  for (Index i = 0; i < big.size(); ++i) left += big.point(i)[0] < 0.5;
  const double frac = static_cast<double>(left) / 10000.0;
  CHECK(frac >= 0.49);
  CHECK(frac <= 0.51);
}

TEST_CASE("samples stay in the support and follow the grid masses") {
  const auto g = sample_grid();
  const auto cloud = sample_binomial(ProcessConfig::binomial(g, 40000, 21), 0);
  std::array<double, 4> counts{};
  for (Index i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    REQUIRE(g.support().contains(p));
    counts[static_cast<std::size_t>((p[0] < 0.5 ? 0 : 2) + (p[1] < 0.5 ? 0 : 1))] += 1.0;
  }
  const std::array<double, 4> expect = {0.1, 0.2, 0.3, 0.4};
  for (std::size_t c = 0; c < 4; ++c) {
    const double se = std::sqrt(expect[c] * (1 - expect[c]) / 40000.0);
    CHECK(std::fabs(counts[c] / 40000.0 - expect[c]) <= 4.0 * se);
  }
}

TEST_CASE("ball mass") {
  const auto u = unit_square();
  const Eigen::Vector2d c(0.5, 0.5);
  CHECK(u.ball_mass(c, 0.0) == 0.0);
  CHECK(u.ball_mass(c, 0.1) == doctest::Approx(std::numbers::pi * 0.01).epsilon(1e-12));
  // quarter disk at a corner
  CHECK(u.ball_mass(Eigen::Vector2d(0, 0), 0.5) == doctest::Approx(std::numbers::pi * 0.25 / 4).epsilon(1e-10));
  // whole square
  CHECK(u.ball_mass(c, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto g = sample_grid();
  CHECK(g.ball_mass(c, 5.0) == doctest::Approx(1.0).epsilon(1e-10));
  const auto b = sample_beta();
  CHECK(b.ball_mass(c, 5.0) == doctest::Approx(1.0).epsilon(1e-8));

  // 1-D beta: ball mass is a CDF difference
  const auto b1 = DensitySpec::product_beta(Box::unit(1), {{2.0, 2.0, 0.0, 1.0}}, 1.5);
  const double lo = 0.3, hi = 0.5;  // Beta(2,2) CDF 3x^2 - 2x^3
  auto cdf = [](double t) { return 3 * t * t - 2 * t * t * t; };
  CHECK(b1.ball_mass(Eigen::VectorXd::Constant(1, 0.4), 0.1) == doctest::Approx(cdf(hi) - cdf(lo)).epsilon(1e-10));
}

TEST_CASE("measure growth bound holds on random balls") {
  Rng rng(77);
  for (const auto& q : {unit_square(), sample_grid(), sample_beta()}) {
    const double kappa = q.sup_density() * unit_ball_volume(2);
    for (int t = 0; t < 100; ++t) {
      const Eigen::Vector2d x(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2));
      const double r = rng.uniform(0.0, 0.6);
      CHECK(q.ball_mass(x, r) <= kappa * r * r + 1e-8);
    }
  }
  const auto cube = DensitySpec::uniform_box(Box::unit(3));
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector3d x(rng.uniform(), rng.uniform(), rng.uniform());
    const double r = rng.uniform(0.0, 0.4);
    CHECK(cube.ball_mass(x, r) <= unit_ball_volume(3) * r * r * r + 1e-8);
  }
}

TEST_CASE("grid ball mass matches Monte Carlo") {
  const auto g = sample_grid();
  const Eigen::Vector2d c(0.45, 0.6);
  const double r = 0.3;
  const auto cloud = sample_binomial(ProcessConfig::binomial(g, 200000, 5), 0);
  double hits = 0;
  for (Index i = 0; i < cloud.size(); ++i) hits += squared_distance(cloud.point(i), c) <= r * r;
  const double p = hits / 200000.0;
  CHECK(std::fabs(g.ball_mass(c, r) - p) <= 4.0 * std::sqrt(p * (1 - p) / 200000.0));
}

TEST_CASE("density specifications from JSON") {
  const auto doc = nlohmann::json::parse(R"({"kind": "piecewise-constant-grid", "support": [[0,1],[0,1]],
      "params": {"shape": [2, 2], "values": [0.4, 0.8, 1.2, 1.6]}, "sup_density": 1.6})");
  const auto g = DensitySpec::from_json(doc);
  CHECK(g.kind() == DensityKind::PiecewiseConstantGrid);
  CHECK(g.pdf(Eigen::Vector2d(0.75, 0.75)) == doctest::Approx(1.6));
  CHECK(DensitySpec::from_json(g.to_json()).to_json() == g.to_json());

  auto bad = doc;
  bad["params"]["values"] = {0.4, 0.8, 1.2, 1.7};
  CHECK_THROWS_AS(DensitySpec::from_json(bad), ConfigError);
  auto low_sup = doc;
  low_sup["sup_density"] = 1.0;
  CHECK_THROWS_AS(DensitySpec::from_json(low_sup), ConfigError);

  const auto cfg = ProcessConfig::from_json(nlohmann::json::parse(
      R"({"density": {"kind": "uniform-box", "support": [[0,2]]}, "process": {"mode": "poisson", "intensity": 3}, "seed": 5})"));
  CHECK(cfg.mode == ProcessMode::Poisson);
  CHECK(cfg.intensity == 3.0);
  CHECK(cfg.seed == 5);
  CHECK(ProcessConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(unit_ball_volume(4) == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0));
}

TEST_CASE("CSV round trip") {
  const auto cloud = sample_poisson(ProcessConfig::poisson(sample_beta(), 20.0, 1), 0);
  std::stringstream ss;
  write_csv(ss, cloud);
  CHECK(read_csv(ss) == cloud);
  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(read_csv(bad), InvalidInput);
  std::stringstream nan("1,nan\n");
  CHECK_THROWS(read_csv(nan));
}
