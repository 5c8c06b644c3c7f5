#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "homotopy/affine_map.hpp"

namespace homotopy {

std::string_view tool_version();

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// Everything needed to reproduce a run. Only `started_at` and `wall_seconds` vary between
/// otherwise identical runs, and neither ever enters a score payload.
struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config = nlohmann::json::object();
  std::vector<InputDigest> inputs;
  std::string version;
  std::uint64_t seed = 0;
  std::string started_at;  // UTC, ISO 8601
  double wall_seconds = 0.0;
};

/// Starts the clock; call finish() right before emitting.
class ManifestBuilder {
 public:
  ManifestBuilder(std::vector<std::string> command_line, std::uint64_t seed);

  void set_config(nlohmann::json config);
  void add_input(const std::filesystem::path& path);
  RunManifest finish() const;

 private:
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

void to_json(nlohmann::json& j, const RunManifest& manifest);

/// Operator norm and condition number of the linear part.
nlohmann::json map_summary(const AffineMap& map);

/// {"scores": payload, "manifest": ...}
nlohmann::json make_report(const nlohmann::json& scores, const RunManifest& manifest);

/// Stable text form of a score payload: sorted keys, two-space indent, trailing newline.
std::string dump_payload(const nlohmann::json& payload);

/// Writes report.json, scores.json and every sidecar into `out_dir`, creating it if needed.
void write_bundle(const std::filesystem::path& out_dir, const nlohmann::json& scores, const RunManifest& manifest,
                  const std::map<std::string, std::string>& sidecars);

}  // namespace homotopy
