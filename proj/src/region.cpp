// SPDX-License-Identifier: Apache-2.0
#include "stabkit/region.hpp"

#include "stabkit/error.hpp"

namespace stabkit {

Region Region::from_json(const nlohmann::json& doc) {
  try {
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "full") return full();
    if (kind == "half_space") return half_space(doc.at("axis").get<int>(), doc.at("threshold").get<double>());
    throw ConfigError("unknown region kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("region: ") + e.what());
  }
}

nlohmann::json Region::to_json() const {
  if (kind == Kind::Full) return {{"kind", "full"}};
  return {{"kind", "half_space"}, {"axis", axis}, {"threshold", threshold}};
}

}  // namespace stabkit
