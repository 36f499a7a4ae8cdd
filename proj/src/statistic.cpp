// SPDX-License-Identifier: Apache-2.0
#include "stabkit/statistic.hpp"

#include "stabkit/error.hpp"
#include "stabkit/knn.hpp"
#include "stabkit/mst.hpp"

#include <cmath>
#include <fstream>
#include <memory>

namespace stabkit {

double StatisticDescriptor::score(Index i, const PointCloud& cloud) const {
  if (!scores) throw Unsupported("statistic '" + name + "' has no score decomposition");
  return scores(cloud).at(static_cast<std::size_t>(i));
}

StatisticParams StatisticParams::from_json(const nlohmann::json& doc) {
  StatisticParams p;
  try {
    p.k = doc.value("k", p.k);
    p.theta = doc.value("theta", p.theta);
    p.r = doc.value("r", p.r);
    if (doc.contains("kind")) p.complex = complex_kind_from_string(doc.at("kind").get<std::string>());
    p.max_time = doc.value("max_time", p.max_time);
    p.budget = doc.value("budget", p.budget);
    p.scale_n = doc.value("scale_n", p.scale_n);
    p.thermodynamic = doc.value("thermodynamic", p.thermodynamic);
    p.weights = doc.value("weights", p.weights);
    if (doc.contains("box")) {
      const auto lo = doc.at("box").at("lo").get<std::vector<double>>();
      const auto hi = doc.at("box").at("hi").get<std::vector<double>>();
      p.box = Box(Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Index>(lo.size())),
                  Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Index>(hi.size())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("statistic parameters: ") + e.what());
  }
  return p;
}

nlohmann::json StatisticParams::to_json() const {
  nlohmann::json doc = {{"k", k},
                        {"theta", theta},
                        {"r", r},
                        {"kind", to_string(complex)},
                        {"max_time", max_time},
                        {"budget", budget},
                        {"scale_n", scale_n},
                        {"thermodynamic", thermodynamic},
                        {"weights", weights}};
  if (box) {
    doc["box"] = {{"lo", std::vector<double>(box->lo.data(), box->lo.data() + box->lo.size())},
                  {"hi", std::vector<double>(box->hi.data(), box->hi.data() + box->hi.size())}};
  }
  return doc;
}

const std::vector<std::string>& statistic_names() {
  static const std::vector<std::string> names = {"cardinality", "coord_sum", "knn",           "entropy",
                                                 "euler",       "mst",       "superdiffusive"};
  return names;
}

namespace {

double distance_scale(double scale_n, int dim) { return std::pow(scale_n, 1.0 / std::max(dim, 1)); }

StatisticDescriptor cardinality() {
  StatisticDescriptor f;
  f.name = "cardinality";
  f.evaluate = [](const PointCloud& c) { return static_cast<double>(c.size()); };
  f.radius_formula = "0";
  f.radius = [](const PointCloud&, const Eigen::Ref<const Eigen::VectorXd>&) { return 0.0; };
  f.scores = [](const PointCloud& c) { return std::vector<double>(static_cast<std::size_t>(c.size()), 1.0); };
  return f;
}

StatisticDescriptor coord_sum() {
  StatisticDescriptor f;
  f.name = "coord_sum";
  f.evaluate = [](const PointCloud& c) { return c.coords().sum(); };
  f.radius_formula = "0";
  f.radius = [](const PointCloud&, const Eigen::Ref<const Eigen::VectorXd>&) { return 0.0; };
  f.scores = [](const PointCloud& c) {
    std::vector<double> s(static_cast<std::size_t>(c.size()));
    for (Index i = 0; i < c.size(); ++i) s[static_cast<std::size_t>(i)] = c.point(i).sum();
    return s;
  };
  return f;
}

StatisticDescriptor superdiffusive() {
  StatisticDescriptor f;
  f.name = "superdiffusive";
  f.evaluate = [](const PointCloud& c) {
    const double n = static_cast<double>(c.size());
    return std::pow(n, 1.5) * c.coords().row(0).mean();
  };
  return f;
}

StatisticDescriptor knn(const StatisticParams& p) {
  if (p.k < 1) throw InvalidInput("knn needs k >= 1");
  if (!(p.theta > 0.0)) throw InvalidInput("knn needs theta > 0");
  StatisticDescriptor f;
  f.name = "knn";
  const int k = p.k;
  const double theta = p.theta;
  const double scale_n = p.scale_n;
  f.evaluate = [=](const PointCloud& c) { return total_edge_length(c, k, theta, distance_scale(scale_n, c.dim())); };
  f.radius_formula = "4R, R the six-triangle radius (d = 2)";
  f.radius = [=](const PointCloud& c, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return 4.0 * six_triangle_radius(c, x, k);
  };
  f.scores = [=](const PointCloud& c) {
    const KnnGraph g = build_knn_graph(c, k);
    const double scale = distance_scale(scale_n, c.dim());
    std::vector<double> s(static_cast<std::size_t>(c.size()));
    for (Index i = 0; i < c.size(); ++i) s[static_cast<std::size_t>(i)] = knn_score(i, g, theta, scale);
    return s;
  };
  return f;
}

WeightVector load_weights(const std::string& spec, int k, int dim) {
  if (spec == "kl") return WeightVector::indicator(k, dim);
  if (spec == "auto") return solve_weights(k, dim);
  std::ifstream in(spec);
  if (!in) throw ConfigError("cannot open weight file '" + spec + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("weight file '" + spec + "': " + e.what());
  }
  WeightVector w = WeightVector::from_json(doc);
  if (w.k != k) throw ConfigError("weight file k does not match the requested k");
  return w;
}

StatisticDescriptor entropy(const StatisticParams& p) {
  StatisticDescriptor f;
  f.name = "entropy";
  const int k = p.k;
  const std::string spec = p.weights;
  // Weights depend on the dimension only, so are resolved lazily per dimension.
  auto cache = std::make_shared<std::vector<std::optional<WeightVector>>>(7);
  auto weights_for = [=](int dim) -> const WeightVector& {
    if (dim < 1 || dim > 6) throw InvalidInput("entropy supports 1 <= d <= 6");
    auto& slot = (*cache)[static_cast<std::size_t>(dim)];
    if (!slot) slot = load_weights(spec, k, dim);
    return *slot;
  };
  // Resolve eagerly for the common dimensions so concurrent evaluation never writes the cache.
  for (int d = 1; d <= 6; ++d) {
    try {
      weights_for(d);
    } catch (const Error&) {
      if (spec != "auto") throw;
    }
  }
  f.evaluate = [=](const PointCloud& c) {
    const WeightVector& w = weights_for(c.dim());
    return spec == "kl" ? kl_entropy(c, k).value : weighted_entropy(c, k, w).value;
  };
  f.scores = [=](const PointCloud& c) {
    const WeightVector& w = weights_for(c.dim());
    std::vector<double> s(static_cast<std::size_t>(c.size()));
    for (Index i = 0; i < c.size(); ++i) s[static_cast<std::size_t>(i)] = entropy_score(i, c, w);
    return s;
  };
  return f;
}

StatisticDescriptor euler(const StatisticParams& p) {
  StatisticDescriptor f;
  f.name = "euler";
  const double r = p.r;
  const ComplexKind kind = p.complex;
  const double max_time = p.max_time;
  const auto budget = p.budget;
  const double scale_n = p.scale_n;
  if (!(r > 0.0) || r > max_time) throw InvalidInput("filtration time must lie in (0, T]");
  f.evaluate = [=](const PointCloud& c) { return euler_statistic(c, r, kind, scale_n, max_time, budget); };
  f.radius_formula = "2r";
  f.radius = [=](const PointCloud& c, const Eigen::Ref<const Eigen::VectorXd>&) {
    return 2.0 * r / distance_scale(scale_n, c.dim());
  };
  return f;
}

StatisticDescriptor mst(const StatisticParams& p) {
  StatisticDescriptor f;
  f.name = "mst";
  const auto box = p.box;
  f.evaluate = [=](const PointCloud& c) {
    return box ? mst_restricted(c, *box).total_length : euclidean_mst(c).total_length;
  };
  return f;
}

}  // namespace

StatisticDescriptor make_statistic(const std::string& name, const StatisticParams& params) {
  if (name == "cardinality") return cardinality();
  if (name == "coord_sum") return coord_sum();
  if (name == "superdiffusive") return superdiffusive();
  if (name == "knn") return knn(params);
  if (name == "entropy") return entropy(params);
  if (name == "euler") return euler(params);
  if (name == "mst") return mst(params);
  throw InvalidInput("unknown statistic '" + name + "'");
}

StatisticDescriptor make_statistic_for_size(const std::string& name, const StatisticParams& params, double size) {
  StatisticParams p = params;
  if (p.thermodynamic && (name == "knn" || name == "euler")) p.scale_n = size;
  return make_statistic(name, p);
}

StatisticDescriptor linear_combination(const StatisticDescriptor& f, double a, const StatisticDescriptor& g,
                                       double b) {
  StatisticDescriptor h;
  h.name = "linear(" + f.name + "," + g.name + ")";
  h.evaluate = [=](const PointCloud& c) { return a * f(c) + b * g(c); };
  h.empty_value = a * f.empty_value + b * g.empty_value;
  if (f.has_score() && g.has_score()) {
    h.scores = [=](const PointCloud& c) {
      auto s = f.scores(c);
      const auto t = g.scores(c);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = a * s[i] + b * t[i];
      return s;
    };
  }
  return h;
}

}  // namespace stabkit
