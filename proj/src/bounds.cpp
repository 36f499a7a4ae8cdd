// SPDX-License-Identifier: Apache-2.0
#include "stabkit/bounds.hpp"

#include "stabkit/cost_operators.hpp"
#include "stabkit/density.hpp"
#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/random.hpp"

#include <cmath>

namespace stabkit {

Eigen::VectorXd halton_point(std::uint64_t index, int dim) {
  static constexpr std::array<std::uint64_t, 6> primes = {2, 3, 5, 7, 11, 13};
  if (dim < 1 || dim > 6) throw InvalidInput("halton_point supports 1 <= d <= 6");
  Eigen::VectorXd u(dim);
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t b = primes[static_cast<std::size_t>(a)];
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index; i > 0; i /= b) {
      f /= static_cast<double>(b);
      r += f * static_cast<double>(i % b);
    }
    u[a] = r;
  }
  return u;
}

Estimate theta_bound(const DensitySpec& density, const Region& k, const DecayConstants& decay, double p, double s,
                     const ThetaOptions& options) {
  if (!(p > 4.0)) throw InvalidInput("theta bound needs p > 4");
  if (!(decay.c2 > 0.0) || !(decay.c3 > 0.0)) throw InvalidInput("decay constants must be positive");
  if (!(s > 0.0)) throw InvalidInput("intensity must be positive");
  if (options.points < 1 || options.shifts < 2) throw InvalidInput("theta bound needs points and at least two shifts");
  if (k.kind == Region::Kind::Full) return {s, 0.0};
  const int d = density.dim();
  const double rate = decay.c2 * (p - 4.0) / (4.0 * p);
  const double scale = std::pow(s, 1.0 / d);
  std::vector<double> means(options.shifts);
  for (std::size_t j = 0; j < options.shifts; ++j) {
    Rng rng(derive_seed(options.seed, {j}));
    Eigen::VectorXd shift(d);
    for (int a = 0; a < d; ++a) shift[a] = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 1; i <= options.points; ++i) {
      Eigen::VectorXd u = halton_point(i, d) + shift;
      for (int a = 0; a < d; ++a) u[a] -= std::floor(u[a]);
      const Eigen::VectorXd x = density.transform_unit(u);
      acc += std::exp(-rate * std::pow(0.5 * scale * k.distance(x), decay.c3));
    }
    means[j] = acc / static_cast<double>(options.points);
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(means.size() - 1);
  return {s * mean, s * std::sqrt(var / static_cast<double>(means.size()))};
}

nlohmann::json BoundReport::to_json() const {
  auto vec = [](const Point& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : b_estimates) {
    nlohmann::json partners = nlohmann::json::array();
    for (const auto& q : b.partners) {
      partners.push_back({{"y", vec(q.y)},
                          {"weight", q.weight},
                          {"b1", q.b1},
                          {"b2", q.b2},
                          {"b3", q.b3},
                          {"b4", q.b4},
                          {"b5", q.b5}});
    }
    bs.push_back({{"x", vec(b.x)}, {"b1", b.b1}, {"b2", b.b2}, {"partners", partners}});
  }
  nlohmann::json gammas = nlohmann::json::array();
  for (const auto& g : gamma_terms) gammas.push_back({{"value", g.value}, {"standard_error", g.standard_error}});
  return {{"b_estimates", bs},
          {"gamma_terms", gammas},
          {"theta", theta},
          {"variance_estimate", {{"value", variance_estimate.value}, {"standard_error", variance_estimate.standard_error}}}};
}

namespace {

// Per-replication add-one costs for one anchor and its partners.
struct CostSample {
  double dx = 0.0, dx_a = 0.0;
  std::vector<double> dy, dy_a, dxy, dxy_a;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  const auto n = static_cast<double>(v.size());
  for (double x : v) out.mean += x;
  out.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

double q4(double v) { return v * v * v * v; }

// sqrt(K) / V and its delta-method standard error.
Estimate root_over_var(const MeanSe& k, const Estimate& v) {
  Estimate g;
  const double root = std::sqrt(std::max(k.mean, 0.0));
  g.value = root / v.value;
  double var = std::pow(root / (v.value * v.value) * v.standard_error, 2);
  if (k.mean > 0.0) var += std::pow(k.se / (2.0 * root * v.value), 2);
  g.standard_error = std::sqrt(var);
  return g;
}

}  // namespace

BoundReport theorem31_bound(const StatisticDescriptor& f, const ProcessConfig& config,
                            const std::function<Window(const Point&)>& windows, const Theorem31Options& options) {
  if (config.mode != ProcessMode::Poisson) throw InvalidInput("theorem31_bound needs a Poisson process");
  const std::size_t m = options.replications;
  if (m < 500) throw InvalidInput("theorem31_bound needs at least 500 replications");
  if (options.anchors < 2 || options.partners < 2) throw InvalidInput("theorem31_bound needs >= 2 anchors and partners");
  const DensitySpec& q = config.density;
  const int d = q.dim();
  const double s = config.intensity;
  const double rho = options.partner_radius * std::pow(s, -1.0 / d);
  const double ball_density = 1.0 / (unit_ball_volume(d) * std::pow(rho, d));
  auto window_of = [&](const Point& x) { return windows ? windows(x) : Window::all(); };

  BoundReport report;
  Rng rng(derive_seed(config.seed, {3}));
  std::vector<Window> anchor_windows;
  std::vector<std::vector<Window>> partner_windows;
  for (std::size_t a = 0; a < options.anchors; ++a) {
    BEstimate b;
    b.x = q.sample(rng);
    anchor_windows.push_back(window_of(b.x));
    partner_windows.emplace_back();
    for (std::size_t j = 0; j < options.partners; ++j) {
      BEstimate::Partner pt;
      if (rng.uniform() < 0.5) {
        pt.y = q.sample(rng);
      } else {
        Point dir(d);
        for (int c = 0; c < d; ++c) dir[c] = rng.normal();
        pt.y = b.x + dir.normalized() * (rho * std::pow(rng.uniform(), 1.0 / d));
      }
      const double qy = q.pdf(pt.y);
      const double near = squared_distance(pt.y, b.x) <= rho * rho ? ball_density : 0.0;
      pt.weight = qy > 0.0 ? qy / (0.5 * qy + 0.5 * near) : 0.0;
      partner_windows.back().push_back(window_of(pt.y));
      b.partners.push_back(std::move(pt));
    }
    report.b_estimates.push_back(std::move(b));
  }

  std::vector<double> values(m);
  std::vector<std::vector<CostSample>> costs(m, std::vector<CostSample>(options.anchors));
  parallel_for(m, options.workers, [&](std::size_t rep) {
    const PointCloud cloud = sample_process(config, rep);
    values[rep] = f(cloud);
    for (std::size_t a = 0; a < options.anchors; ++a) {
      const auto& b = report.b_estimates[a];
      const Window& wa = anchor_windows[a];
      const bool all_a = wa.kind() == WindowKind::All;
      CostSample& c = costs[rep][a];
      c.dx = add_one_cost(f, cloud, b.x);
      c.dx_a = all_a ? c.dx : flexible_cost(f, cloud, b.x, wa);
      for (std::size_t j = 0; j < b.partners.size(); ++j) {
        const auto& pt = b.partners[j];
        if (pt.weight == 0.0) {
          c.dy.push_back(0.0);
          c.dy_a.push_back(0.0);
          c.dxy.push_back(0.0);
          c.dxy_a.push_back(0.0);
          continue;
        }
        const Window& wy = partner_windows[a][j];
        const double dy = add_one_cost(f, cloud, pt.y);
        c.dy.push_back(dy);
        c.dy_a.push_back(wy.kind() == WindowKind::All ? dy : flexible_cost(f, cloud, pt.y, wy));
        const PointCloud marked = cloud.with(pt.y);
        const double dxy = add_one_cost(f, marked, b.x);
        c.dxy.push_back(dxy);
        c.dxy_a.push_back(all_a ? dxy : flexible_cost(f, marked, b.x, wa));
      }
    }
  });

  // Variance of F with a delta-method standard error.
  {
    const auto mm = static_cast<double>(m);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= mm;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
      const double t = (v - mean) * (v - mean);
      m2 += t;
      m4 += t * t;
    }
    const double var = m2 / (mm - 1.0);
    if (var < 1e-12) throw Degenerate("variance estimate below 1e-12");
    m4 /= mm;
    const double m2b = m2 / mm;
    report.variance_estimate = {var, std::sqrt(std::max(m4 - m2b * m2b, 0.0) / mm)};
  }

  const auto mm = static_cast<double>(m);
  for (std::size_t a = 0; a < options.anchors; ++a) {
    auto& b = report.b_estimates[a];
    for (std::size_t rep = 0; rep < m; ++rep) {
      const CostSample& c = costs[rep][a];
      b.b1 += q4(c.dx - c.dx_a);
      b.b2 += q4(c.dx_a);
      for (std::size_t j = 0; j < b.partners.size(); ++j) {
        auto& pt = b.partners[j];
        if (pt.weight == 0.0) continue;  // outside the support: not evaluated, reported as 0
        pt.b1 += q4(c.dy[j] - c.dy_a[j]);
        pt.b2 += q4(c.dy_a[j]);
        pt.b3 += q4(c.dxy[j] - c.dxy_a[j]);
        pt.b4 += q4(c.dx_a - c.dx);
        pt.b5 += q4(c.dxy_a[j] - c.dx_a);
      }
    }
    b.b1 /= mm;
    b.b2 /= mm;
    for (auto& pt : b.partners) {
      for (double* v : {&pt.b1, &pt.b2, &pt.b3, &pt.b4, &pt.b5}) *v /= mm;
    }
  }

  // Per-anchor integrands; lambda = s Q and the partner weights turn partner averages into Q-integrals.
  const std::size_t la = options.anchors;
  std::vector<double> i34(la), i12(la), i1(la), k1(la), k2(la), k6(la);
  for (std::size_t a = 0; a < la; ++a) {
    const auto& b = report.b_estimates[a];
    i34[a] = s * (std::pow(b.b1, 0.75) + std::pow(b.b2, 0.75));
    i12[a] = s * (std::sqrt(b.b1) + std::sqrt(b.b2));
    i1[a] = s * (b.b1 + b.b2);
    const std::size_t lp = b.partners.size();
    std::vector<double> pb14(lp), s14(lp), s12(lp), s1(lp), w(lp);
    for (std::size_t j = 0; j < lp; ++j) {
      const auto& pt = b.partners[j];
      w[j] = pt.weight;
      pb14[j] = std::pow(pt.b1, 0.25) + std::pow(pt.b2, 0.25);
      s14[j] = std::pow(pt.b3, 0.25) + std::pow(pt.b4, 0.25) + std::pow(pt.b5, 0.25);
      s12[j] = std::sqrt(pt.b3) + std::sqrt(pt.b4) + std::sqrt(pt.b5);
      s1[j] = pt.b3 + pt.b4 + pt.b5;
    }
    double t6 = 0.0;
    for (std::size_t j = 0; j < lp; ++j) t6 += w[j] * ((std::sqrt(b.b1) + std::sqrt(b.b2)) * s12[j] + s1[j]);
    k6[a] = s * s * t6 / static_cast<double>(lp);
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t j = 0; j < lp; ++j) {
      for (std::size_t l = 0; l < lp; ++l) {
        if (j == l) continue;
        t1 += w[j] * w[l] * pb14[j] * pb14[l] * s14[j] * s14[l];
        t2 += w[j] * w[l] * s1[j] * s1[l];
      }
    }
    const double pairs = static_cast<double>(lp * (lp - 1));
    k1[a] = s * s * s * t1 / pairs;
    k2[a] = s * s * s * t2 / pairs;
  }
  const Estimate v = report.variance_estimate;
  const MeanSe j34 = mean_se(i34), j12 = mean_se(i12), j1 = mean_se(i1);
  report.gamma_terms[0] = root_over_var(mean_se(k1), v);
  report.gamma_terms[1] = root_over_var(mean_se(k2), v);
  {
    Estimate g;
    g.value = j34.mean / std::pow(v.value, 1.5);
    g.standard_error = std::hypot(j34.se / std::pow(v.value, 1.5),
                                  1.5 * j34.mean / std::pow(v.value, 2.5) * v.standard_error);
    report.gamma_terms[2] = g;
  }
  {
    const double inner = std::sqrt(std::max(j12.mean, 0.0)) + std::pow(std::max(j1.mean, 0.0), 0.25) + std::sqrt(v.value);
    Estimate g;
    g.value = j34.mean * inner / (v.value * v.value);
    double var = std::pow(inner / (v.value * v.value) * j34.se, 2);
    if (j12.mean > 0.0) var += std::pow(j34.mean / (2.0 * std::sqrt(j12.mean) * v.value * v.value) * j12.se, 2);
    if (j1.mean > 0.0) var += std::pow(j34.mean / (4.0 * std::pow(j1.mean, 0.75) * v.value * v.value) * j1.se, 2);
    const double dv = j34.mean * (0.5 / std::sqrt(v.value)) / (v.value * v.value) -
                      2.0 * j34.mean * inner / (v.value * v.value * v.value);
    var += std::pow(dv * v.standard_error, 2);
    g.standard_error = std::sqrt(var);
    report.gamma_terms[3] = g;
  }
  report.gamma_terms[4] = root_over_var(j1, v);
  report.gamma_terms[5] = root_over_var(mean_se(k6), v);
  report.theta = theta_bound(q, options.k, options.decay, options.p, s).value;
  return report;
}

}  // namespace stabkit
