// SPDX-License-Identifier: Apache-2.0
#include "stabkit/density.hpp"

#include "stabkit/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace stabkit {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 14;

double integrate(const auto& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, kQuadDepth, kQuadTol);
}

// Integral of sqrt(r^2 - t^2) dt.
double half_chord_primitive(double t, double r) {
  t = std::clamp(t, -r, r);
  return 0.5 * (t * std::sqrt(std::max(0.0, r * r - t * t)) + r * r * std::asin(t / r));
}

double beta_pdf01(const BetaAxis& ax, double u) {
  if (u < 0.0 || u > 1.0) return 0.0;
  // boost's ibeta_derivative is the Beta(a, b) density.
  return boost::math::ibeta_derivative(ax.alpha, ax.beta, u);
}

}  // namespace

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::UniformBox:
      return "uniform-box";
    case DensityKind::PiecewiseConstantGrid:
      return "piecewise-constant-grid";
    case DensityKind::TruncatedProductBeta:
      return "truncated-product-beta";
  }
  return "?";
}

double unit_ball_volume(int d) {
  if (d < 1) throw InvalidInput("unit_ball_volume: dimension must be positive");
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(1.0 + 0.5 * d);
}

double disk_rectangle_area(double cx, double cy, double r, double x0, double x1, double y0, double y1) {
  if (!(r > 0.0)) return 0.0;
  const double a0 = std::max(x0 - cx, -r);
  const double a1 = std::min(x1 - cx, r);
  if (!(a1 > a0)) return 0.0;
  const double b0 = y0 - cy;
  const double b1 = y1 - cy;
  if (!(b1 > b0)) return 0.0;
  std::vector<double> cuts{a0, a1};
  for (double b : {b0, b1}) {
    if (std::fabs(b) < r) {
      const double w = std::sqrt(r * r - b * b);
      for (double t : {-w, w}) {
        if (t > a0 && t < a1) cuts.push_back(t);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double h = std::sqrt(std::max(0.0, r * r - mid * mid));
    const bool top_clip = b1 < h;    // upper end is b1, else +h
    const bool bot_clip = b0 > -h;   // lower end is b0, else -h
    if ((top_clip ? b1 : h) <= (bot_clip ? b0 : -h)) continue;
    const double H = half_chord_primitive(hi, r) - half_chord_primitive(lo, r);
    const double width = hi - lo;
    const double upper = top_clip ? b1 * width : H;
    const double lower = bot_clip ? b0 * width : -H;
    area += upper - lower;
  }
  return area;
}

DensitySpec DensitySpec::uniform_box(Box support) {
  DensitySpec d;
  d.kind_ = DensityKind::UniformBox;
  d.support_ = std::move(support);
  if (!(d.support_.volume() > 0.0)) throw ConfigError("uniform-box support must have positive volume");
  d.sup_density_ = 1.0 / d.support_.volume();
  d.validate();
  return d;
}

DensitySpec DensitySpec::grid(Box support, std::vector<int> shape, std::vector<double> values, double sup_density) {
  DensitySpec d;
  d.kind_ = DensityKind::PiecewiseConstantGrid;
  d.support_ = std::move(support);
  d.shape_ = std::move(shape);
  d.values_ = std::move(values);
  d.sup_density_ = sup_density;
  if (static_cast<int>(d.shape_.size()) != d.dim()) throw ConfigError("grid shape must have one entry per axis");
  std::size_t cells = 1;
  for (int m : d.shape_) {
    if (m < 1) throw ConfigError("grid shape entries must be positive");
    cells *= static_cast<std::size_t>(m);
  }
  if (d.values_.size() != cells) throw ConfigError("grid values must have prod(shape) entries");
  for (double v : d.values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("grid values must be finite and nonnegative");
  }
  const double cell_vol = d.support_.volume() / static_cast<double>(cells);
  // prefix masses: level d-1 holds cell masses, lower levels marginalise trailing axes.
  const int dim = d.dim();
  d.prefix_mass_.assign(static_cast<std::size_t>(dim), {});
  auto& last = d.prefix_mass_[static_cast<std::size_t>(dim - 1)];
  last.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) last[i] = d.values_[i] * cell_vol;
  for (int l = dim - 2; l >= 0; --l) {
    const auto& finer = d.prefix_mass_[static_cast<std::size_t>(l + 1)];
    const auto m = static_cast<std::size_t>(d.shape_[static_cast<std::size_t>(l + 1)]);
    auto& coarse = d.prefix_mass_[static_cast<std::size_t>(l)];
    coarse.assign(finer.size() / m, 0.0);
    for (std::size_t i = 0; i < finer.size(); ++i) coarse[i / m] += finer[i];
  }
  d.validate();
  return d;
}

DensitySpec DensitySpec::product_beta(Box support, std::vector<BetaAxis> axes, double sup_density) {
  DensitySpec d;
  d.kind_ = DensityKind::TruncatedProductBeta;
  d.support_ = std::move(support);
  d.axes_ = std::move(axes);
  d.sup_density_ = sup_density;
  if (static_cast<int>(d.axes_.size()) != d.dim()) throw ConfigError("product-beta needs one axis law per dimension");
  for (const auto& ax : d.axes_) {
    if (!(ax.alpha > 0.0) || !(ax.beta > 0.0)) throw ConfigError("beta parameters must be positive");
    if (!(ax.u_lo >= 0.0 && ax.u_lo < ax.u_hi && ax.u_hi <= 1.0)) throw ConfigError("beta truncation must satisfy 0 <= lo < hi <= 1");
    if ((ax.alpha < 1.0 && ax.u_lo == 0.0) || (ax.beta < 1.0 && ax.u_hi == 1.0)) {
      throw ConfigError("beta truncation leaves an unbounded density");
    }
    const double c0 = boost::math::ibeta(ax.alpha, ax.beta, ax.u_lo);
    const double c1 = boost::math::ibeta(ax.alpha, ax.beta, ax.u_hi);
    d.axis_cdf_lo_.push_back(c0);
    d.axis_cdf_span_.push_back(c1 - c0);
    if (!(c1 - c0 > 0.0)) throw ConfigError("beta truncation interval carries no mass");
  }
  d.validate();
  return d;
}

void DensitySpec::validate() const {
  if (!(support_.volume() > 0.0)) throw ConfigError("support must have positive volume");
  if (!(sup_density_ > 0.0) || !std::isfinite(sup_density_)) throw ConfigError("sup_density must be positive and finite");
  if (kind_ == DensityKind::PiecewiseConstantGrid) {
    const auto& cells = prefix_mass_.back();
    const double total = std::accumulate(cells.begin(), cells.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("grid density does not integrate to 1 (total " + std::to_string(total) + ")");
  }
  const double exact = max_density();
  if (exact > sup_density_ * (1.0 + 1e-12)) throw ConfigError("sup_density is below the density maximum");
  // Spot check on a lattice of interior points.
  const int per_axis = dim() <= 2 ? 17 : (dim() <= 4 ? 5 : 3);
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(dim());
  Eigen::VectorXd x(dim());
  while (true) {
    for (int a = 0; a < dim(); ++a) {
      const double f = (idx[a] + 0.5) / per_axis;
      x[a] = support_.lo[a] + f * (support_.hi[a] - support_.lo[a]);
    }
    if (pdf(x) > sup_density_ * (1.0 + 1e-12)) throw ConfigError("sup_density violated at a spot-check point");
    int a = 0;
    while (a < dim() && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == dim()) break;
  }
}

double DensitySpec::max_density() const {
  switch (kind_) {
    case DensityKind::UniformBox:
      return 1.0 / support_.volume();
    case DensityKind::PiecewiseConstantGrid:
      return *std::max_element(values_.begin(), values_.end());
    case DensityKind::TruncatedProductBeta: {
      double prod = 1.0;
      for (int a = 0; a < dim(); ++a) {
        const auto& ax = axes_[static_cast<std::size_t>(a)];
        std::vector<double> cand{ax.u_lo, ax.u_hi};
        if (ax.alpha > 1.0 && ax.beta > 1.0) {
          cand.push_back(std::clamp((ax.alpha - 1.0) / (ax.alpha + ax.beta - 2.0), ax.u_lo, ax.u_hi));
        }
        double best = 0.0;
        for (double u : cand) best = std::max(best, beta_pdf01(ax, u));
        const double scale = (ax.u_hi - ax.u_lo) / (support_.hi[a] - support_.lo[a]);
        prod *= best / axis_cdf_span_[static_cast<std::size_t>(a)] * scale;
      }
      return prod;
    }
  }
  return 0.0;
}

double DensitySpec::axis_pdf(int a, double x) const {
  const auto& ax = axes_[static_cast<std::size_t>(a)];
  const double lo = support_.lo[a], hi = support_.hi[a];
  if (x < lo || x > hi) return 0.0;
  const double u = ax.u_lo + (x - lo) / (hi - lo) * (ax.u_hi - ax.u_lo);
  return beta_pdf01(ax, u) / axis_cdf_span_[static_cast<std::size_t>(a)] * (ax.u_hi - ax.u_lo) / (hi - lo);
}

double DensitySpec::axis_cdf(int a, double x) const {
  const auto& ax = axes_[static_cast<std::size_t>(a)];
  const double lo = support_.lo[a], hi = support_.hi[a];
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double u = ax.u_lo + (x - lo) / (hi - lo) * (ax.u_hi - ax.u_lo);
  const auto s = static_cast<std::size_t>(a);
  return (boost::math::ibeta(ax.alpha, ax.beta, u) - axis_cdf_lo_[s]) / axis_cdf_span_[s];
}

double DensitySpec::axis_quantile(int a, double p) const {
  const auto& ax = axes_[static_cast<std::size_t>(a)];
  const auto s = static_cast<std::size_t>(a);
  const double target = std::clamp(axis_cdf_lo_[s] + p * axis_cdf_span_[s], 0.0, 1.0);
  double u = boost::math::ibeta_inv(ax.alpha, ax.beta, target);
  u = std::clamp(u, ax.u_lo, ax.u_hi);
  const double lo = support_.lo[a], hi = support_.hi[a];
  return lo + (u - ax.u_lo) / (ax.u_hi - ax.u_lo) * (hi - lo);
}

Eigen::VectorXd DensitySpec::grid_cell_lo(std::size_t flat) const {
  Eigen::VectorXd lo(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto m = static_cast<std::size_t>(shape_[static_cast<std::size_t>(a)]);
    const auto i = flat % m;
    flat /= m;
    const double w = (support_.hi[a] - support_.lo[a]) / static_cast<double>(m);
    lo[a] = support_.lo[a] + static_cast<double>(i) * w;
  }
  return lo;
}

double DensitySpec::pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw InvalidInput("pdf: dimension mismatch");
  if (!support_.contains(x)) return 0.0;
  switch (kind_) {
    case DensityKind::UniformBox:
      return 1.0 / support_.volume();
    case DensityKind::PiecewiseConstantGrid: {
      std::size_t flat = 0;
      for (int a = 0; a < dim(); ++a) {
        const int m = shape_[static_cast<std::size_t>(a)];
        const double f = (x[a] - support_.lo[a]) / (support_.hi[a] - support_.lo[a]);
        const int i = std::clamp(static_cast<int>(std::floor(f * m)), 0, m - 1);
        flat = flat * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
      }
      return values_[flat];
    }
    case DensityKind::TruncatedProductBeta: {
      double prod = 1.0;
      for (int a = 0; a < dim(); ++a) prod *= axis_pdf(a, x[a]);
      return prod;
    }
  }
  return 0.0;
}

Eigen::VectorXd DensitySpec::transform_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != dim()) throw InvalidInput("transform_unit: dimension mismatch");
  Eigen::VectorXd x(dim());
  switch (kind_) {
    case DensityKind::UniformBox:
      x = support_.lo.array() + u.array() * (support_.hi - support_.lo).array();
      break;
    case DensityKind::TruncatedProductBeta:
      for (int a = 0; a < dim(); ++a) x[a] = axis_quantile(a, u[a]);
      break;
    case DensityKind::PiecewiseConstantGrid: {
      std::size_t prefix = 0;
      for (int a = 0; a < dim(); ++a) {
        const auto m = static_cast<std::size_t>(shape_[static_cast<std::size_t>(a)]);
        const auto& level = prefix_mass_[static_cast<std::size_t>(a)];
        const std::size_t base = prefix * m;
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) total += level[base + i];
        const double target = u[a] * total;
        double acc = 0.0;
        std::size_t pick = m - 1;
        double frac = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double w = level[base + i];
          if (w > 0.0 && target < acc + w) {
            pick = i;
            frac = (target - acc) / w;
            break;
          }
          acc += w;
        }
        if (pick == m - 1 && level[base + pick] == 0.0) {
          // Trailing empty cells: fall back to the last cell with mass.
          for (std::size_t i = m; i-- > 0;) {
            if (level[base + i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
        const double w = (support_.hi[a] - support_.lo[a]) / static_cast<double>(m);
        x[a] = support_.lo[a] + (static_cast<double>(pick) + std::clamp(frac, 0.0, 1.0)) * w;
        prefix = base + pick;
      }
      break;
    }
  }
  return x;
}

Eigen::VectorXd DensitySpec::sample(Rng& rng) const {
  Eigen::VectorXd u(dim());
  switch (kind_) {
    case DensityKind::UniformBox:
    case DensityKind::TruncatedProductBeta:
      for (int a = 0; a < dim(); ++a) u[a] = rng.uniform();
      return transform_unit(u);
    case DensityKind::PiecewiseConstantGrid:
      while (true) {
        for (int a = 0; a < dim(); ++a) u[a] = rng.uniform(support_.lo[a], support_.hi[a]);
        if (rng.uniform() * sup_density_ < pdf(u)) return u;
      }
  }
  return u;
}

double DensitySpec::box_mass(const Box& box) const {
  const Box b = support_.intersect(box);
  if (b.is_empty()) return 0.0;
  switch (kind_) {
    case DensityKind::UniformBox:
      return b.volume() / support_.volume();
    case DensityKind::TruncatedProductBeta: {
      double prod = 1.0;
      for (int a = 0; a < dim(); ++a) prod *= axis_cdf(a, b.hi[a]) - axis_cdf(a, b.lo[a]);
      return prod;
    }
    case DensityKind::PiecewiseConstantGrid: {
      double total = 0.0;
      const auto& cells = prefix_mass_.back();
      Eigen::VectorXd w = (support_.hi - support_.lo).array() / Eigen::Map<const Eigen::VectorXi>(shape_.data(), dim()).cast<double>().array();
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == 0.0) continue;
        const Eigen::VectorXd lo = grid_cell_lo(i);
        const Box cell(lo, lo + w);
        const Box c = cell.intersect(b);
        if (c.is_empty()) continue;
        total += values_[i] * c.volume();
      }
      return total;
    }
  }
  return 0.0;
}

// Integral over piece ∩ B_c(radius) of the axis weights (constant: weight 1, else the
// product-beta marginals). Outer axes use t = c + rho sin(theta), which removes the
// square-root endpoint behaviour; the innermost axis (or innermost two when constant) is exact.
double DensitySpec::piece_ball_integral(const Eigen::Ref<const Eigen::VectorXd>& c, double radius, const Box& piece,
                                        bool constant) const {
  const int d = dim();
  auto inner = [&](auto&& self, int axis, double rho) -> double {
    if (!(rho > 0.0)) return 0.0;
    const double lo = piece.lo[axis], hi = piece.hi[axis];
    if (axis == d - 1) {
      const double a = std::max(lo, c[axis] - rho), b = std::min(hi, c[axis] + rho);
      if (!(b > a)) return 0.0;
      return constant ? b - a : axis_cdf(axis, b) - axis_cdf(axis, a);
    }
    if (constant && axis == d - 2) {
      return disk_rectangle_area(c[axis], c[axis + 1], rho, lo, hi, piece.lo[axis + 1], piece.hi[axis + 1]);
    }
    const double s0 = std::clamp((lo - c[axis]) / rho, -1.0, 1.0);
    const double s1 = std::clamp((hi - c[axis]) / rho, -1.0, 1.0);
    if (!(s1 > s0)) return 0.0;
    std::vector<double> cuts{std::asin(s0), std::asin(s1)};
    // Kinks where the slice radius reaches a face of the next axis.
    for (double face : {piece.lo[axis + 1], piece.hi[axis + 1]}) {
      const double gap = std::fabs(face - c[axis + 1]);
      if (gap < rho) {
        const double th = std::acos(gap / rho);
        for (double t : {-th, th}) {
          if (t > cuts[0] && t < cuts[1]) cuts.push_back(t);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double th) {
      const double ct = std::cos(th);
      const double t = c[axis] + rho * std::sin(th);
      const double w = constant ? 1.0 : axis_pdf(axis, t);
      return w == 0.0 ? 0.0 : w * rho * ct * self(self, axis + 1, rho * ct);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1]);
    return total;
  };
  return inner(inner, 0, radius);
}

double DensitySpec::ball_mass(const Eigen::Ref<const Eigen::VectorXd>& center, double radius) const {
  if (center.size() != dim()) throw InvalidInput("ball_mass: dimension mismatch");
  if (!(radius >= 0.0)) throw InvalidInput("ball_mass: radius must be nonnegative");
  if (radius == 0.0) return 0.0;
  const Box bbox(center.array() - radius, center.array() + radius);
  const Box clipped = support_.intersect(bbox);
  if (clipped.is_empty()) return 0.0;
  switch (kind_) {
    case DensityKind::UniformBox: {
      if (clipped == bbox) return unit_ball_volume(dim()) * std::pow(radius, dim()) / support_.volume();
      return piece_ball_integral(center, radius, clipped, true) / support_.volume();
    }
    case DensityKind::TruncatedProductBeta:
      return piece_ball_integral(center, radius, clipped, false);
    case DensityKind::PiecewiseConstantGrid: {
      Eigen::VectorXd w = (support_.hi - support_.lo).array() /
                          Eigen::Map<const Eigen::VectorXi>(shape_.data(), dim()).cast<double>().array();
      double total = 0.0;
      const auto& cells = prefix_mass_.back();
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (values_[i] == 0.0) continue;
        const Eigen::VectorXd lo = grid_cell_lo(i);
        const Box cell(lo, lo + w);
        const Box c = cell.intersect(clipped);
        if (c.is_empty()) continue;
        total += values_[i] * piece_ball_integral(center, radius, c, true);
      }
      return total;
    }
  }
  return 0.0;
}

DensitySpec DensitySpec::from_json(const nlohmann::json& doc) {
  try {
    const auto kind = doc.at("kind").get<std::string>();
    const auto& sup = doc.at("support");
    if (!sup.is_array() || sup.empty()) throw ConfigError("support must be a nonempty array of [lo,hi]");
    const auto d = static_cast<Eigen::Index>(sup.size());
    Eigen::VectorXd lo(d), hi(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto& iv = sup.at(static_cast<std::size_t>(a));
      lo[a] = iv.at(0).get<double>();
      hi[a] = iv.at(1).get<double>();
      if (!(hi[a] > lo[a])) throw ConfigError("support interval must have lo < hi");
    }
    if (d > 6) throw ConfigError("supported dimensions are 1..6");
    Box box(lo, hi);
    const nlohmann::json params = doc.value("params", nlohmann::json::object());
    if (kind == "uniform-box") {
      auto spec = uniform_box(box);
      if (doc.contains("sup_density")) {
        spec.sup_density_ = doc.at("sup_density").get<double>();
        spec.validate();
      }
      return spec;
    }
    const double sup_density = doc.at("sup_density").get<double>();
    if (kind == "piecewise-constant-grid") {
      return grid(box, params.at("shape").get<std::vector<int>>(), params.at("values").get<std::vector<double>>(),
                  sup_density);
    }
    if (kind == "truncated-product-beta") {
      const auto alpha = params.at("alpha").get<std::vector<double>>();
      const auto beta = params.at("beta").get<std::vector<double>>();
      if (alpha.size() != static_cast<std::size_t>(d) || beta.size() != static_cast<std::size_t>(d)) {
        throw ConfigError("alpha and beta need one entry per axis");
      }
      std::vector<BetaAxis> axes(static_cast<std::size_t>(d));
      for (std::size_t a = 0; a < axes.size(); ++a) {
        axes[a].alpha = alpha[a];
        axes[a].beta = beta[a];
        if (params.contains("truncate")) {
          axes[a].u_lo = params["truncate"].at(a).at(0).get<double>();
          axes[a].u_hi = params["truncate"].at(a).at(1).get<double>();
        }
      }
      return product_beta(box, std::move(axes), sup_density);
    }
    throw ConfigError("unknown density kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("density spec: ") + e.what());
  }
}

nlohmann::json DensitySpec::to_json() const {
  nlohmann::json doc;
  doc["kind"] = to_string(kind_);
  auto sup = nlohmann::json::array();
  for (int a = 0; a < dim(); ++a) sup.push_back({support_.lo[a], support_.hi[a]});
  doc["support"] = sup;
  nlohmann::json params = nlohmann::json::object();
  if (kind_ == DensityKind::PiecewiseConstantGrid) {
    params["shape"] = shape_;
    params["values"] = values_;
  } else if (kind_ == DensityKind::TruncatedProductBeta) {
    std::vector<double> alpha, beta;
    auto trunc = nlohmann::json::array();
    for (const auto& ax : axes_) {
      alpha.push_back(ax.alpha);
      beta.push_back(ax.beta);
      trunc.push_back({ax.u_lo, ax.u_hi});
    }
    params["alpha"] = alpha;
    params["beta"] = beta;
    params["truncate"] = trunc;
  }
  doc["params"] = params;
  doc["sup_density"] = sup_density_;
  return doc;
}

}  // namespace stabkit
