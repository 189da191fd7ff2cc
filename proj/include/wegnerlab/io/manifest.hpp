#pragma once

/// Run provenance: tool version, config digest, seed, time and command line.

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace wegnerlab::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lowercase hex SHA-256 of `data`.
inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Digest of the canonical serialization of an effective config.
inline std::string config_digest(const nlohmann::json& effective) {
  return sha256_hex(effective.dump());
}

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  std::uint64_t master_seed = 0;
  std::string timestamp;  // UTC, ISO 8601
  std::string command_line;

  /// Fields that determine the results; embedded in result files.
  nlohmann::json stable_json() const {
    return {{"tool_version", tool_version}, {"config_digest", config_digest}, {"master_seed", master_seed}};
  }

  nlohmann::json to_json() const {
    auto j = stable_json();
    j["timestamp"] = timestamp;
    j["command_line"] = command_line;
    return j;
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace wegnerlab::io
