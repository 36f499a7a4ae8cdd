// SPDX-License-Identifier: Apache-2.0
#include "stabkit/diagnostics.hpp"

#include "stabkit/cost_operators.hpp"
#include "stabkit/density.hpp"
#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stabkit {

double binomial_se(double p, std::size_t m) { return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(m)); }

nlohmann::json AssumptionReport::to_json() const {
  auto list = [](const std::vector<Estimate>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : v) out.push_back({{"value", e.value}, {"standard_error", e.standard_error}});
    return out;
  };
  nlohmann::json doc = {{"kind", kind},
                        {"grid", grid},
                        {"estimates", list(estimates)},
                        {"fitted_constants", fitted_constants},
                        {"degenerate_fit", degenerate_fit},
                        {"trivially_satisfied", trivially_satisfied},
                        {"notes", notes}};
  if (!marked_estimates.empty()) doc["marked_estimates"] = list(marked_estimates);
  return doc;
}

void fit_tail(AssumptionReport& report, double scale, int dim, const std::string& prefix) {
  std::vector<double> shapes = {0.5, 1.0, 0.5 * dim, static_cast<double>(dim)};
  std::sort(shapes.begin(), shapes.end());
  shapes.erase(std::unique(shapes.begin(), shapes.end()), shapes.end());
  std::vector<double> r, y;
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    if (report.estimates[i].value > 0.0) {
      r.push_back(report.grid[i]);
      y.push_back(std::log(report.estimates[i].value));
    }
  }
  if (r.size() < 2) {
    report.degenerate_fit = true;
    report.notes.push_back(r.empty() ? "tail estimate is zero at every grid point"
                                     : "only one grid point with positive estimate");
    return;
  }
  double best_ssr = std::numeric_limits<double>::infinity();
  for (double shape : shapes) {
    std::vector<double> z(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = std::pow(scale * r[i], shape);
    double zbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      zbar += z[i];
      ybar += y[i];
    }
    zbar /= static_cast<double>(z.size());
    ybar /= static_cast<double>(z.size());
    double szz = 0.0, szy = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      szz += (z[i] - zbar) * (z[i] - zbar);
      szy += (z[i] - zbar) * (y[i] - ybar);
    }
    if (!(szz > 0.0)) continue;
    const double slope = szy / szz;
    const double a = ybar - slope * zbar;
    double ssr = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) ssr += std::pow(y[i] - a - slope * z[i], 2);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      report.fitted_constants[prefix + "1"] = std::exp(a);
      report.fitted_constants[prefix + "2"] = -slope;
      report.fitted_constants[prefix + "3"] = shape;
    }
  }
  if (!std::isfinite(best_ssr)) {
    report.degenerate_fit = true;
    report.notes.push_back("grid points coincide; no fit");
    return;
  }
  report.fitted_constants["residual_ss"] = best_ssr;
  if (report.fitted_constants[prefix + "2"] <= 0.0) report.notes.push_back("fitted decay rate is not positive");
}

AssumptionReport estimate_radius_tail(const StatisticDescriptor& f, const ProcessConfig& config,
                                      const Eigen::Ref<const Eigen::VectorXd>& x, const std::vector<double>& radii,
                                      const RadiusTailOptions& options) {
  const std::size_t m = options.replications;
  if (m < 100) throw InvalidInput("estimate_radius_tail needs at least 100 replications");
  if (options.probes < 1) throw InvalidInput("estimate_radius_tail needs at least one probe");
  if (x.size() != config.density.dim()) throw InvalidInput("point dimension does not match the process");
  for (double r : radii) {
    if (!(r >= 0.0)) throw InvalidInput("radii must be nonnegative");
  }
  ProcessConfig probe_config = config;
  probe_config.seed = derive_seed(config.seed, {1});
  const Point center = x;
  std::vector<std::vector<char>> hit(m, std::vector<char>(radii.size(), 0));
  parallel_for(m, options.workers, [&](std::size_t rep) {
    const PointCloud cloud = sample_process(config, rep);
    std::vector<PointCloud> probes;
    for (std::size_t q = 0; q < options.probes; ++q) probes.push_back(sample_process(probe_config, rep * options.probes + q));
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double r2 = radii[ri] * radii[ri];
      const PointCloud inner = cloud.filter([&](const auto& p) { return squared_distance(p, center) <= r2; });
      const double base = add_one_cost(f, inner, center);
      for (const auto& probe : probes) {
        PointCloud combined = inner;
        for (Index i = 0; i < probe.size(); ++i) {
          if (squared_distance(probe.point(i), center) > r2) combined.push_back(probe.point(i));
        }
        if (combined.size() == inner.size()) continue;
        if (std::fabs(add_one_cost(f, combined, center) - base) > kZeroTolerance) {
          hit[rep][ri] = 1;
          break;
        }
      }
    }
  });
  AssumptionReport report;
  report.kind = "radius_decay";
  report.grid = radii;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    std::size_t count = 0;
    for (std::size_t rep = 0; rep < m; ++rep) count += static_cast<std::size_t>(hit[rep][ri]);
    const double p = static_cast<double>(count) / static_cast<double>(m);
    report.estimates.push_back({p, binomial_se(p, m)});
  }
  report.notes.push_back("finite probes under-estimate the tail");
  const int d = config.density.dim();
  fit_tail(report, std::pow(config.size_parameter(), 1.0 / d), d, "c");
  return report;
}

AssumptionReport estimate_kexp(const StatisticDescriptor& f, const ProcessConfig& config, const Region& k,
                               const std::vector<double>& distances, const KexpOptions& options) {
  AssumptionReport report;
  report.kind = "k_exponential";
  if (k.kind == Region::Kind::Full) {
    report.grid = {0.0};
    report.trivially_satisfied = true;
    report.notes.push_back("K is the whole space: d(x, K) = 0 for every x");
    return report;
  }
  const std::size_t m = options.replications;
  if (m < 1) throw InvalidInput("estimate_kexp needs replications");
  const int d = config.density.dim();
  if (k.axis < 0 || k.axis >= d) throw InvalidInput("region axis out of range");
  std::vector<Point> xs;
  for (double delta : distances) {
    if (!(delta >= 0.0)) throw InvalidInput("distances must be nonnegative");
    Point x = config.density.support().center();
    x[k.axis] = k.threshold + delta;
    xs.push_back(x);
  }
  std::vector<std::vector<char>> plain(m, std::vector<char>(xs.size())), marked(m, std::vector<char>(xs.size()));
  parallel_for(m, options.workers, [&](std::size_t rep) {
    const PointCloud cloud = sample_process(config, rep);
    Rng rng(derive_seed(config.seed, {2, rep}));
    const Point star = config.density.sample(rng);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      plain[rep][i] = std::fabs(add_one_cost(f, cloud, xs[i])) > kZeroTolerance;
      marked[rep][i] = std::fabs(add_one_cost_marked(f, cloud, xs[i], star)) > kZeroTolerance;
    }
  });
  report.grid = distances;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t a = 0, b = 0;
    for (std::size_t rep = 0; rep < m; ++rep) {
      a += static_cast<std::size_t>(plain[rep][i]);
      b += static_cast<std::size_t>(marked[rep][i]);
    }
    const double pa = static_cast<double>(a) / static_cast<double>(m);
    const double pb = static_cast<double>(b) / static_cast<double>(m);
    report.estimates.push_back({pa, binomial_se(pa, m)});
    report.marked_estimates.push_back({pb, binomial_se(pb, m)});
  }
  fit_tail(report, std::pow(config.size_parameter(), 1.0 / d), d, "k");
  return report;
}

AssumptionReport estimate_moment_sup(const StatisticDescriptor& f, const ProcessConfig& config, double p,
                                     const std::vector<Point>& x_grid, const MomentOptions& options) {
  if (!(p > 4.0)) throw InvalidInput("moment condition needs p > 4");
  if (x_grid.size() < 2) throw InvalidInput("moment grid needs at least two points");
  const std::size_t m = options.replications;
  if (m < 2) throw InvalidInput("estimate_moment_sup needs at least two replications");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      if (i != j && x_grid[i] != x_grid[j]) pairs.emplace_back(i, j);
    }
  }
  if (pairs.empty()) throw InvalidInput("moment grid needs two distinct points");
  std::vector<std::vector<double>> plain(m, std::vector<double>(x_grid.size()));
  std::vector<std::vector<double>> marked(m, std::vector<double>(pairs.size()));
  parallel_for(m, options.workers, [&](std::size_t rep) {
    const PointCloud cloud = sample_process(config, rep);
    for (std::size_t i = 0; i < x_grid.size(); ++i) plain[rep][i] = std::pow(std::fabs(add_one_cost(f, cloud, x_grid[i])), p);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [i, j] = pairs[q];
      marked[rep][q] = std::pow(std::fabs(add_one_cost_marked(f, cloud, x_grid[i], x_grid[j])), p);
    }
  });
  AssumptionReport report;
  report.kind = "moment";
  double best = -1.0, best_se = 0.0;
  const double mm = static_cast<double>(m);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto i = pairs[q].first;
    double sa = 0.0, sb = 0.0, ss = 0.0;
    for (std::size_t rep = 0; rep < m; ++rep) {
      sa += plain[rep][i];
      sb += marked[rep][q];
    }
    const double ea = sa / mm, eb = sb / mm;
    double va = 0.0, vb = 0.0;
    for (std::size_t rep = 0; rep < m; ++rep) {
      va += std::pow(plain[rep][i] - ea, 2);
      vb += std::pow(marked[rep][q] - eb, 2);
      ss += std::pow(plain[rep][i] + marked[rep][q] - ea - eb, 2);
    }
    report.grid.push_back(static_cast<double>(q));
    report.estimates.push_back({ea, std::sqrt(va / (mm - 1.0) / mm)});
    report.marked_estimates.push_back({eb, std::sqrt(vb / (mm - 1.0) / mm)});
    const double h = ea + eb;
    if (h > best) {
      best = h;
      best_se = std::sqrt(ss / (mm - 1.0) / mm);
    }
    report.notes.push_back("pair " + std::to_string(q) + ": x = grid[" + std::to_string(i) + "], x* = grid[" +
                           std::to_string(pairs[q].second) + "]");
  }
  report.fitted_constants["p"] = p;
  report.fitted_constants["H"] = best;
  report.fitted_constants["H_se"] = best_se;
  return report;
}

double euler_moment_bound(int dim, double r, double sup_density, double p) {
  const double mu = unit_ball_volume(dim) * sup_density * std::pow(r, dim);
  return (1.0 + std::pow(2.0, p)) * std::exp(mu * (std::pow(2.0, p) - 1.0));
}

}  // namespace stabkit
