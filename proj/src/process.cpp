// SPDX-License-Identifier: Apache-2.0
#include "stabkit/process.hpp"

#include "stabkit/error.hpp"

namespace stabkit {

ProcessConfig ProcessConfig::poisson(DensitySpec density, double s, std::uint64_t seed) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("Poisson intensity must be positive and finite");
  ProcessConfig c;
  c.density = std::move(density);
  c.mode = ProcessMode::Poisson;
  c.intensity = s;
  c.seed = seed;
  return c;
}

ProcessConfig ProcessConfig::binomial(DensitySpec density, Index n, std::uint64_t seed) {
  if (n < 0) throw InvalidInput("binomial size must be nonnegative");
  ProcessConfig c;
  c.density = std::move(density);
  c.mode = ProcessMode::Binomial;
  c.n = n;
  c.seed = seed;
  return c;
}

ProcessConfig ProcessConfig::with_size(double size) const {
  ProcessConfig c = *this;
  if (mode == ProcessMode::Poisson) {
    if (!(size > 0.0)) throw InvalidInput("Poisson intensity must be positive");
    c.intensity = size;
  } else {
    if (size < 0.0 || size != std::floor(size)) throw InvalidInput("binomial size must be a nonnegative integer");
    c.n = static_cast<Index>(size);
  }
  return c;
}

ProcessConfig ProcessConfig::from_json(const nlohmann::json& doc) {
  try {
    ProcessConfig c;
    c.density = DensitySpec::from_json(doc.at("density"));
    c.seed = doc.value("seed", std::uint64_t{0});
    const auto& proc = doc.at("process");
    const auto mode = proc.at("mode").get<std::string>();
    if (mode == "poisson") {
      c.mode = ProcessMode::Poisson;
      c.intensity = proc.at("intensity").get<double>();
      if (!(c.intensity > 0.0)) throw ConfigError("Poisson intensity must be positive");
    } else if (mode == "binomial") {
      c.mode = ProcessMode::Binomial;
      c.n = proc.at("n").get<Index>();
      if (c.n < 0) throw ConfigError("binomial n must be nonnegative");
    } else {
      throw ConfigError("process mode must be 'poisson' or 'binomial'");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("process config: ") + e.what());
  }
}

nlohmann::json ProcessConfig::to_json() const {
  nlohmann::json doc;
  doc["density"] = density.to_json();
  doc["seed"] = seed;
  if (mode == ProcessMode::Poisson) {
    doc["process"] = {{"mode", "poisson"}, {"intensity", intensity}};
  } else {
    doc["process"] = {{"mode", "binomial"}, {"n", n}};
  }
  return doc;
}

PointCloud sample_points(const DensitySpec& density, Index count, Rng& rng) {
  Eigen::MatrixXd m(density.dim(), count);
  for (Index i = 0; i < count; ++i) m.col(i) = density.sample(rng);
  return PointCloud(std::move(m));
}

PointCloud sample_poisson(const ProcessConfig& config, std::uint64_t seed_offset) {
  if (config.mode != ProcessMode::Poisson) throw InvalidInput("sample_poisson needs a Poisson config");
  Rng rng(derive_seed(config.seed, {seed_offset}));
  // Q is normalised on its support, so Q(support) = 1.
  const auto count = static_cast<Index>(rng.poisson(config.intensity));
  return sample_points(config.density, count, rng);
}

PointCloud sample_binomial(const ProcessConfig& config, std::uint64_t seed_offset) {
  if (config.mode != ProcessMode::Binomial) throw InvalidInput("sample_binomial needs a binomial config");
  Rng rng(derive_seed(config.seed, {seed_offset}));
  return sample_points(config.density, config.n, rng);
}

PointCloud sample_process(const ProcessConfig& config, std::uint64_t seed_offset) {
  return config.mode == ProcessMode::Poisson ? sample_poisson(config, seed_offset)
                                             : sample_binomial(config, seed_offset);
}

}  // namespace stabkit
