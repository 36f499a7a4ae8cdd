// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stabkit {

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(const std::string& bytes);

/// Provenance block embedded in every output: enough to reproduce the file byte for byte.
struct RunManifest {
  std::vector<std::string> command_line;  // worker count and output paths removed
  std::string config_digest;              // fnv1a64 of the canonical config JSON, 16 hex digits
  std::uint64_t seed = 0;
  std::string version;
  std::optional<double> timing_seconds;  // only when explicitly requested; breaks byte identity

  static RunManifest make(const std::vector<std::string>& argv, const nlohmann::json& config, std::uint64_t seed);
  nlohmann::json to_json() const;
};

/// Library version string.
const char* version();

/// Canonical serialisation: sorted keys, no whitespace, shortest round-trip numbers.
std::string canonical_json(const nlohmann::json& doc);

}  // namespace stabkit
