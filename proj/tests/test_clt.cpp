// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include "stabkit/clt.hpp"
#include "stabkit/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace stabkit;

namespace {

ExperimentSpec poisson_cardinality(std::vector<double> grid, std::size_t m, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.statistic = "cardinality";
  spec.process = ProcessConfig::poisson(DensitySpec::uniform_box(Box::unit(2)), grid.front(), seed);
  spec.grid = std::move(grid);
  spec.replications = m;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("Kolmogorov distance examples") {
  const std::vector<double> atom{0.0};
  CHECK(kolmogorov_distance(atom, normal_cdf) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> three{-1.0, 0.0, 1.0};
  double terms = 0.0;
  for (int i = 1; i <= 3; ++i) {
    const double phi = oracle::std_normal_cdf(three[static_cast<std::size_t>(i - 1)]);
    terms = std::max({terms, i / 3.0 - phi, phi - (i - 1) / 3.0});
  }
  CHECK(kolmogorov_distance(three, normal_cdf) == doctest::Approx(terms).epsilon(1e-14));
  CHECK(terms == doctest::Approx(oracle::std_normal_cdf(1.0) - 2.0 / 3.0).epsilon(1e-14));

  // a sample against its own empirical distribution function
  const std::vector<double> sample{-0.3, 0.1, 0.4, 2.0, 5.5};
  auto ecdf = [&](double t) {
    return static_cast<double>(std::upper_bound(sample.begin(), sample.end(), t) - sample.begin()) / 5.0;
  };
  auto ecdf_left = [&](double t) {
    return static_cast<double>(std::lower_bound(sample.begin(), sample.end(), t) - sample.begin()) / 5.0;
  };
  CHECK(kolmogorov_distance(sample, ecdf, ecdf_left) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("order-statistic formula against a brute-force grid") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const std::size_t m = 200 + 50 * s;
    std::vector<double> v(m);
    for (auto& x : v) x = rng.normal() * (1.0 + 0.05 * static_cast<double>(s)) + 0.1 * static_cast<double>(s % 3);
    std::sort(v.begin(), v.end());
    const double exact = kolmogorov_distance(v, normal_cdf);
    double brute = 0.0;
    const int steps = 10000;
    const double lo = -8.0, hi = 8.0, h = (hi - lo) / steps;
    for (int t = 0; t <= steps; ++t) {
      const double x = lo + h * t;
      const double f = static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / static_cast<double>(m);
      brute = std::max(brute, std::fabs(f - oracle::std_normal_cdf(x)));
    }
    CHECK(brute <= exact + 1e-15);
    CHECK(exact - brute <= 1.0 / static_cast<double>(m) + h * 0.4);
  }
}

TEST_CASE("DKW radius") {
  CHECK(dkw_radius(2000) == doctest::Approx(std::sqrt(std::log(40.0) / 4000.0)));
}

TEST_CASE("self-standardization") {
  Rng rng(1);
  std::vector<double> v(500);
  for (auto& x : v) x = 3.0 + 2.0 * rng.uniform();
  const auto rec = summarize(10.0, v);
  double mean = 0.0, var = 0.0;
  for (double z : rec.standardized) mean += z;
  mean /= 500.0;
  for (double z : rec.standardized) var += (z - mean) * (z - mean);
  var /= 499.0;
  CHECK(std::fabs(mean) <= 1e-9);
  CHECK(std::fabs(var - 1.0) <= 1e-9);
  CHECK(rec.d_k >= 0.0);
  CHECK(rec.d_k <= 1.0);
  CHECK(rec.values == v);
  CHECK_THROWS_AS(summarize(1.0, std::vector<double>(300, 2.0)), Degenerate);
}

TEST_CASE("synthetic rate fits") {
  const std::vector<double> n{100, 200, 400, 800, 1600};
  std::vector<double> d;
  for (double x : n) d.push_back(0.7 / std::sqrt(x));
  const auto fit = fit_rate(n, d);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.stderr_ <= 1e-12);
  CHECK(fit.curvature_checked);
  CHECK_FALSE(fit.power_law_rejected);

  const std::vector<double> wide{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::vector<double> logd;
  for (double x : wide) logd.push_back(0.5 / std::log(x));
  const auto lf = fit_rate(wide, logd);
  MESSAGE("log-rate slope " << lf.slope << ", curvature " << lf.curvature);
  CHECK(lf.slope > -0.3);
  CHECK(lf.slope < 0.0);
  CHECK(lf.power_law_rejected);

  // drifting local slopes of the same data
  const std::vector<double> head(wide.begin(), wide.begin() + 3), tail(wide.begin() + 3, wide.end());
  const std::vector<double> dhead(logd.begin(), logd.begin() + 3), dtail(logd.begin() + 3, logd.end());
  CHECK(fit_rate(head, dhead).slope < fit_rate(tail, dtail).slope);

  std::vector<double> with_zero = d;
  with_zero[2] = 0.0;
  const auto zf = fit_rate(n, with_zero);
  CHECK(zf.points_used == 4);
  CHECK(zf.warnings.size() == 1);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1, 2, 3}, std::vector<double>{0.1, 0.0, 0.0}), InvalidInput);
}

TEST_CASE("variance scaling verdicts") {
  {
    auto spec = poisson_cardinality({100, 200, 400, 800}, 2000, 3);
    const auto r = run_experiment(spec);
    for (double ratio : r.variance.ratios) CHECK(ratio == doctest::Approx(1.0).epsilon(0.1));
    CHECK(r.variance.bounded);
    CHECK(r.variance.verdict == "bounded");
  }
  {
    ExperimentSpec spec;
    spec.statistic = "knn";
    spec.process = ProcessConfig::binomial(DensitySpec::uniform_box(Box::unit(2)), 100, 4);
    spec.grid = {100, 200, 400, 800};
    spec.replications = 500;
    spec.seed = 4;
    const auto r = run_experiment(spec);
    MESSAGE("knn variance spread " << r.variance.spread);
    CHECK(r.variance.verdict == "bounded");
  }
  {
    ExperimentSpec spec;
    spec.statistic = "superdiffusive";
    spec.process = ProcessConfig::binomial(DensitySpec::uniform_box(Box::unit(2)), 100, 5);
    spec.grid = {100, 200, 400, 800};
    spec.replications = 500;
    spec.seed = 5;
    const auto r = run_experiment(spec);
    CHECK_FALSE(r.variance.bounded);
    CHECK(r.variance.verdict != "bounded");
  }
  const std::vector<double> sizes{1, 2, 4, 8}, flat{1, 2, 4, 8};
  CHECK(variance_scaling(sizes, flat).bounded);
}

TEST_CASE("Euler statistic variance grows linearly") {
  ExperimentSpec spec;
  spec.statistic = "euler";
  spec.params.r = 1.0;
  spec.process = ProcessConfig::binomial(DensitySpec::uniform_box(Box::unit(2)), 500, 6);
  spec.grid = {500, 1000, 2000};
  spec.replications = 1000;
  spec.seed = 6;
  const auto r = run_experiment(spec);
  const auto [lo, hi] = std::minmax_element(r.variance.ratios.begin(), r.variance.ratios.end());
  MESSAGE("n / Var ratios " << r.variance.ratios[0] << " " << r.variance.ratios[1] << " " << r.variance.ratios[2]);
  CHECK(*hi / *lo <= 1.2);
}

TEST_CASE("i.i.d. sums converge at the square-root rate") {
  const Box unit(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  ExperimentSpec spec;
  spec.statistic = "coord_sum";
  // a skewed law; symmetric summands would converge at 1/n
  spec.process = ProcessConfig::binomial(DensitySpec::product_beta(unit, {BetaAxis{1.0, 4.0}}, 4.0), 4, 7);
  spec.grid = {4, 8, 16, 32, 64};
  spec.replications = 200000;
  spec.seed = 7;
  const auto r = run_experiment(spec);
  MESSAGE("slope " << r.fit.slope << " +- " << r.fit.stderr_);
  CHECK(std::fabs(r.fit.slope + 0.5) <= 0.15);
}

TEST_CASE("Poisson cardinality matches the exact distance") {
  const auto r = run_experiment(poisson_cardinality({20, 50, 100}, 2000, 8));
  for (const auto& rec : r.records) {
    const double exact = oracle::poisson_normal_distance(rec.size);
    MESSAGE("s = " << rec.size << ": " << rec.d_k << " vs exact " << exact);
    CHECK(std::fabs(rec.d_k - exact) <= rec.dkw);
  }
}

TEST_CASE("DKW band covers the exact distance") {
  int covered = 0;
  const int runs = 50;
  for (int i = 0; i < runs; ++i) {
    const auto r = run_experiment(poisson_cardinality({20, 50, 100}, 500, 1000 + static_cast<std::uint64_t>(i)));
    bool all = true;
    for (const auto& rec : r.records) all = all && std::fabs(rec.d_k - oracle::poisson_normal_distance(rec.size)) <= rec.dkw;
    covered += all ? 1 : 0;
  }
  MESSAGE(covered << " of " << runs << " runs covered");
  CHECK(covered >= 45);
}

TEST_CASE("reports are deterministic across reruns and worker counts") {
  ExperimentSpec spec;
  spec.statistic = "knn";
  spec.process = ProcessConfig::poisson(DensitySpec::uniform_box(Box::unit(2)), 50, 9);
  spec.grid = {50, 100, 200};
  spec.replications = 200;
  spec.seed = 9;
  const std::string one = run_experiment(spec).to_json().dump();
  CHECK(run_experiment(spec).to_json().dump() == one);
  spec.workers = 4;
  CHECK(run_experiment(spec).to_json().dump() == one);
  spec.seed = 10;
  CHECK(run_experiment(spec).to_json().dump() != one);
}

TEST_CASE("preconditions and error context") {
  auto spec = poisson_cardinality({10, 20, 40}, 100, 1);
  CHECK_THROWS_AS(run_experiment(spec), InvalidInput);
  spec = poisson_cardinality({10, 20}, 300, 1);
  CHECK_THROWS_AS(run_experiment(spec), InvalidInput);
  spec = poisson_cardinality({10, 30, 20}, 300, 1);
  CHECK_THROWS_AS(run_experiment(spec), InvalidInput);

  ExperimentSpec bad;
  bad.statistic = "entropy";
  bad.params.k = 5;
  bad.process = ProcessConfig::binomial(DensitySpec::uniform_box(Box::unit(2)), 3, 1);
  bad.grid = {3, 10, 20};
  bad.replications = 200;
  try {
    run_experiment(bad);
    FAIL("expected an error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).rfind("size 3, replication 0: ", 0) == 0);
  }
}

TEST_CASE("report serialisation") {
  const auto r = run_experiment(poisson_cardinality({20, 40, 80}, 200, 2));
  const auto j = r.to_json();
  CHECK(j.at("records").size() == 3);
  CHECK(j.at("records")[0].contains("standardized"));
  CHECK_FALSE(r.to_json(false).at("records")[0].contains("standardized"));
  CHECK(j.at("n_grid") == nlohmann::json::array({20.0, 40.0, 80.0}));
  std::ostringstream csv;
  r.write_csv(csv);
  const std::string text = csv.str();
  CHECK(text.rfind("n,mean,var,d_K,dkw_radius\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}
