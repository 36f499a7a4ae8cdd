// SPDX-License-Identifier: Apache-2.0
#include "stabkit/clt.hpp"

#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace stabkit {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_distance(std::span<const double> sorted, const std::function<double(double)>& cdf,
                           const std::function<double(double)>& cdf_left) {
  if (sorted.empty()) throw InvalidInput("kolmogorov_distance needs a nonempty sample");
  const auto m = static_cast<double>(sorted.size());
  double sup = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double x = sorted[i];
    const double below = static_cast<double>(i) / m;     // F_M(x-)
    const double upto = static_cast<double>(j + 1) / m;  // F_M(x)
    const double g = cdf(x);
    const double g_left = cdf_left ? cdf_left(x) : g;
    sup = std::max({sup, std::fabs(upto - g), std::fabs(below - g_left)});
    i = j + 1;
  }
  return std::min(sup, 1.0);
}

double dkw_radius(std::size_t m, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

SizeRecord summarize(double size, std::vector<double> values) {
  SizeRecord rec;
  rec.size = size;
  const std::size_t m = values.size();
  if (m < 2) throw InvalidInput("a size record needs at least two replications");
  double sum = 0.0;
  for (double v : values) sum += v;
  rec.mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double v : values) ss += (v - rec.mean) * (v - rec.mean);
  rec.variance = ss / static_cast<double>(m - 1);
  if (!(rec.variance > 0.0)) {
    throw Degenerate("statistic has zero sample variance at size " + format_double(size));
  }
  const double sd = std::sqrt(rec.variance);
  rec.standardized.resize(m);
  for (std::size_t i = 0; i < m; ++i) rec.standardized[i] = (values[i] - rec.mean) / sd;
  std::vector<double> sorted = rec.standardized;
  std::sort(sorted.begin(), sorted.end());
  rec.d_k = kolmogorov_distance(sorted, normal_cdf);
  rec.dkw = dkw_radius(m);
  rec.values = std::move(values);
  return rec;
}

namespace {

template <class E>
bool rethrow_as(const std::exception& e, const std::string& context) {
  if (dynamic_cast<const E*>(&e) != nullptr) throw E(context + e.what());
  return false;
}

[[noreturn]] void rethrow_with_context(const std::exception& e, const std::string& context) {
  rethrow_as<InvalidInput>(e, context) || rethrow_as<ConfigError>(e, context) ||
      rethrow_as<Unsupported>(e, context) || rethrow_as<Degenerate>(e, context) ||
      rethrow_as<Infeasible>(e, context) || rethrow_as<BudgetExceeded>(e, context);
  throw Error(context + e.what());
}

}  // namespace

MonteCarloReport run_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 200) throw InvalidInput("run_experiment needs at least 200 replications");
  if (spec.grid.size() < 3) throw InvalidInput("run_experiment needs a grid of at least 3 sizes");
  for (std::size_t g = 1; g < spec.grid.size(); ++g) {
    if (!(spec.grid[g] > spec.grid[g - 1])) throw InvalidInput("grid sizes must be strictly increasing");
  }
  MonteCarloReport report;
  report.statistic = spec.statistic;
  report.params = spec.params.to_json();
  report.process = spec.process.to_json();
  report.grid = spec.grid;
  report.replications = spec.replications;
  report.seed = spec.seed;

  for (std::size_t g = 0; g < spec.grid.size(); ++g) {
    const double size = spec.grid[g];
    const StatisticDescriptor f = make_statistic_for_size(spec.statistic, spec.params, size);
    ProcessConfig config = spec.process.with_size(size);
    config.seed = derive_seed(spec.seed, {g});
    std::vector<double> values(spec.replications);
    parallel_for(spec.replications, spec.workers, [&](std::size_t r) {
      try {
        values[r] = f(sample_process(config, r));
      } catch (const std::exception& e) {
        rethrow_with_context(e, "size " + format_double(size) + ", replication " + std::to_string(r) + ": ");
      }
    });
    report.records.push_back(summarize(size, std::move(values)));
  }
  report.fit = fit_rate(report);
  report.variance = variance_scaling(report);
  return report;
}

RateFit fit_rate(std::span<const double> sizes, std::span<const double> d_k) {
  if (sizes.size() != d_k.size()) throw InvalidInput("fit_rate needs matching sizes and distances");
  RateFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (d_k[i] > 0.0 && sizes[i] > 0.0) {
      x.push_back(std::log(sizes[i]));
      y.push_back(std::log(d_k[i]));
    } else {
      fit.warnings.push_back("size " + format_double(sizes[i]) + " excluded: d_K = 0");
    }
  }
  fit.points_used = x.size();
  if (x.size() < 3) throw InvalidInput("fit_rate needs at least 3 grid points with positive d_K");
  const auto m = static_cast<Index>(x.size());
  const Eigen::VectorXd X = Eigen::Map<const Eigen::VectorXd>(x.data(), m);
  const Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), m);
  const double xbar = X.mean();
  const Eigen::VectorXd xc = X.array() - xbar;
  const double sxx = xc.squaredNorm();
  fit.slope = xc.dot(Y) / sxx;
  fit.intercept = Y.mean() - fit.slope * xbar;
  const Eigen::VectorXd resid = Y.array() - fit.intercept - fit.slope * X.array();
  fit.stderr_ = std::sqrt(resid.squaredNorm() / static_cast<double>(m - 2) / sxx);

  if (m >= 4) {
    Eigen::MatrixXd A(m, 3);
    A.col(0).setOnes();
    A.col(1) = xc;
    A.col(2) = xc.array().square();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::VectorXd beta = qr.solve(Y);
    const Eigen::VectorXd r2 = Y - A * beta;
    const double sigma2 = r2.squaredNorm() / static_cast<double>(m - 3);
    const Eigen::MatrixXd cov = sigma2 * (A.transpose() * A).inverse();
    fit.curvature_checked = true;
    fit.curvature = beta[2];
    fit.curvature_se = std::sqrt(std::max(cov(2, 2), 0.0));
    fit.power_law_rejected = std::fabs(fit.curvature) > 2.0 * fit.curvature_se && std::fabs(fit.curvature) > 1e-3;
  } else {
    fit.warnings.push_back("curvature check skipped: fewer than 4 usable points");
  }
  return fit;
}

RateFit fit_rate(const MonteCarloReport& report) {
  std::vector<double> sizes, d;
  for (const auto& rec : report.records) {
    sizes.push_back(rec.size);
    d.push_back(rec.d_k);
  }
  return fit_rate(sizes, d);
}

VarianceScaling variance_scaling(std::span<const double> sizes, std::span<const double> variances) {
  if (sizes.size() != variances.size() || sizes.size() < 3) {
    throw InvalidInput("variance_scaling needs at least 3 sizes with variances");
  }
  VarianceScaling out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out.ratios.push_back(sizes[i] / variances[i]);
  const std::size_t top = (sizes.size() + 1) / 2;
  const auto first = out.ratios.end() - static_cast<std::ptrdiff_t>(top);
  const auto [lo, hi] = std::minmax_element(first, out.ratios.end());
  out.spread = *hi / *lo;
  out.bounded = out.spread <= 1.5;
  out.verdict = out.bounded ? "bounded" : "unbounded";
  return out;
}

VarianceScaling variance_scaling(const MonteCarloReport& report) {
  std::vector<double> sizes, v;
  for (const auto& rec : report.records) {
    sizes.push_back(rec.size);
    v.push_back(rec.variance);
  }
  return variance_scaling(sizes, v);
}

nlohmann::json MonteCarloReport::to_json(bool include_samples) const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = {{"n", r.size}, {"mean", r.mean}, {"variance", r.variance}, {"d_k", r.d_k}, {"dkw_radius", r.dkw}};
    if (include_samples) j["standardized"] = r.standardized;
    recs.push_back(std::move(j));
  }
  return {{"statistic", statistic},
          {"params", params},
          {"process", process},
          {"n_grid", grid},
          {"replications", replications},
          {"seed", seed},
          {"records", recs},
          {"fit",
           {{"slope", fit.slope},
            {"stderr", fit.stderr_},
            {"intercept", fit.intercept},
            {"points_used", fit.points_used},
            {"curvature_checked", fit.curvature_checked},
            {"curvature", fit.curvature},
            {"curvature_se", fit.curvature_se},
            {"power_law_rejected", fit.power_law_rejected},
            {"warnings", fit.warnings}}},
          {"variance_ratios", variance.ratios},
          {"variance_verdict", {{"verdict", variance.verdict}, {"spread", variance.spread}}}};
}

void MonteCarloReport::write_csv(std::ostream& out) const {
  out << "n,mean,var,d_K,dkw_radius\n";
  for (const auto& r : records) {
    out << format_double(r.size) << ',' << format_double(r.mean) << ',' << format_double(r.variance) << ','
        << format_double(r.d_k) << ',' << format_double(r.dkw) << '\n';
  }
}

}  // namespace stabkit
