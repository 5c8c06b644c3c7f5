#include "homotopy/report.hpp"

#include <array>
#include <cmath>
#include <ctime>
#include <memory>
#include <system_error>

#include <openssl/evp.h>

#include "homotopy/errors.hpp"
#include "homotopy/repmat_io.hpp"

namespace homotopy {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

// JSON has no infinity; an unbounded condition number is reported as a string.
nlohmann::json finite_or_label(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : "inf";
}

}  // namespace

std::string_view tool_version() { return HOMOTOPY_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

ManifestBuilder::ManifestBuilder(std::vector<std::string> command_line, std::uint64_t seed)
    : start_(std::chrono::steady_clock::now()) {
  manifest_.command_line = std::move(command_line);
  manifest_.seed = seed;
  manifest_.version = std::string(tool_version());
  manifest_.started_at = utc_timestamp();
}

void ManifestBuilder::set_config(nlohmann::json config) { manifest_.config = std::move(config); }

void ManifestBuilder::add_input(const std::filesystem::path& path) {
  manifest_.inputs.push_back({path.string(), sha256_file(path)});
}

RunManifest ManifestBuilder::finish() const {
  RunManifest out = manifest_;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return out;
}

void to_json(nlohmann::json& j, const RunManifest& manifest) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& in : manifest.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
  j = nlohmann::json{{"command_line", manifest.command_line},
                     {"config", manifest.config},
                     {"inputs", inputs},
                     {"version", manifest.version},
                     {"seed", manifest.seed},
                     {"started_at", manifest.started_at},
                     {"wall_seconds", manifest.wall_seconds}};
}

nlohmann::json map_summary(const AffineMap& map) {
  return {{"input_dim", map.input_dim()},
          {"output_dim", map.output_dim()},
          {"operator_norm", finite_or_label(map.operator_norm())},
          {"condition_number", finite_or_label(map.condition_number())}};
}

nlohmann::json make_report(const nlohmann::json& scores, const RunManifest& manifest) {
  return {{"scores", scores}, {"manifest", manifest}};
}

std::string dump_payload(const nlohmann::json& payload) { return payload.dump(2) + "\n"; }

void write_bundle(const std::filesystem::path& out_dir, const nlohmann::json& scores, const RunManifest& manifest,
                  const std::map<std::string, std::string>& sidecars) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  write_file_bytes(out_dir / "scores.json", dump_payload(scores));
  write_file_bytes(out_dir / "report.json", dump_payload(make_report(scores, manifest)));
  for (const auto& [name, text] : sidecars) write_file_bytes(out_dir / name, text);
}

}  // namespace homotopy
