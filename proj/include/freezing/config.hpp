#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "freezing/error.hpp"
#include "freezing/markov_core.hpp"
#include "freezing/schedules.hpp"

namespace freezing {

using Json = nlohmann::json;

/// Parses a JSON file; throws ConfigError on I/O or syntax problems.
Json load_json_file(const std::filesystem::path& path);

/// A manifest written by a previous run carries its config under "config";
/// anything else is returned unchanged.
Json unwrap_manifest(const Json& j);

struct ParsedGenerator {
  GeneratorMatrix q;
  /// Set for {"complete_graph_theta": [...]}.
  std::optional<std::vector<double>> theta;
};

/// {"dim": D, "q": [[...]]} or {"complete_graph_theta": [...]}.
ParsedGenerator parse_generator(const Json& j);

/// {"kind": "power_law" | "critical" | "log_power" | "constant" | "constant_plus" | "tabulated", ...,
///  "remainder": {"A": .., "theta_r": .., "model": "zero" | "uniform_power", "c": ..}}.
FreezingSchedule parse_schedule(const Json& j);

/// j[key] converted to T, or `fallback` when absent. ConfigError on a type mismatch.
template <class T>
T get_or(const Json& j, std::string_view key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ConfigError, "config key '" + std::string(key) + "' has the wrong type");
  }
}

/// Required key; ConfigError when absent.
const Json& require_key(const Json& j, std::string_view key);

/// SHA-1 of "blob <size>\0" + content, hex encoded (the git object id).
std::string git_blob_sha1(std::string_view content);

/// Canonical text of a config (sorted keys, compact) and its hash.
std::string canonical_dump(const Json& j);
std::string config_hash(const Json& j);

/// {"command", "config", "config_hash", "seed", "threads", "outputs"}.
Json make_manifest(std::string_view command, const Json& resolved, std::uint64_t seed, unsigned threads,
                   const std::vector<std::string>& outputs);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace freezing
