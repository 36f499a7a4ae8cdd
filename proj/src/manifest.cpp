// SPDX-License-Identifier: Apache-2.0
#include "stabkit/manifest.hpp"

#include <cstdio>

namespace stabkit {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* version() { return STABKIT_VERSION; }

std::string canonical_json(const nlohmann::json& doc) { return doc.dump(); }

RunManifest RunManifest::make(const std::vector<std::string>& argv, const nlohmann::json& config, std::uint64_t seed) {
  RunManifest m;
  // Flags that never change the content of an output are dropped.
  for (std::size_t i = 0; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    if (a == "--workers" || a == "--out" || a == "--csv-out" || a == "--graph-out") {
      ++i;
      continue;
    }
    if (a.rfind("--workers=", 0) == 0 || a.rfind("--out=", 0) == 0 || a.rfind("--csv-out=", 0) == 0 ||
        a.rfind("--graph-out=", 0) == 0) {
      continue;
    }
    m.command_line.push_back(a);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json(config))));
  m.config_digest = hex;
  m.seed = seed;
  m.version = stabkit::version();
  return m;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json doc = {{"command_line", command_line}, {"config_digest", config_digest}, {"seed", seed}, {"version", version}};
  if (timing_seconds) doc["timing_seconds"] = *timing_seconds;
  return doc;
}

}  // namespace stabkit
