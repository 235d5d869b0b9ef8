#include "freezing/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <sstream>

namespace freezing {

namespace {

std::vector<double> number_list(const Json& j, std::string_view what) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, std::string(what) + " must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

RemainderSpec parse_remainder(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "remainder must be an object");
  const auto model = get_or<std::string>(j, "model", "zero");
  if (model == "zero") return {};
  if (model == "uniform_power") {
    auto r = RemainderSpec::uniform_power(get_or<double>(j, "c", 1.0), get_or<double>(j, "theta_r", 1.0));
    if (j.contains("A")) r.A = get_or<double>(j, "A", r.A);
    return r;
  }
  throw Error(ErrorCode::ConfigError, "unknown remainder model '" + model + "'");
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

Json unwrap_manifest(const Json& j) {
  if (j.is_object() && j.contains("command") && j.contains("config") && j.contains("config_hash")) {
    return j.at("config");
  }
  return j;
}

const Json& require_key(const Json& j, std::string_view key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ConfigError, "missing config key '" + std::string(key) + "'");
  return *it;
}

ParsedGenerator parse_generator(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "generator must be an object");
  try {
    if (j.contains("complete_graph_theta")) {
      auto theta = number_list(j.at("complete_graph_theta"), "complete_graph_theta");
      return {complete_graph_generator(theta), theta};
    }
    const auto& rows = require_key(j, "q");
    if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ConfigError, "q must be a non-empty array");
    const auto d = static_cast<Eigen::Index>(rows.size());
    if (get_or<Eigen::Index>(j, "dim", d) != d) throw Error(ErrorCode::ConfigError, "dim does not match q");
    Matrix raw(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto row = number_list(rows[static_cast<std::size_t>(r)], "q row");
      if (static_cast<Eigen::Index>(row.size()) != d) throw Error(ErrorCode::ConfigError, "q must be square");
      for (Eigen::Index c = 0; c < d; ++c) raw(r, c) = row[static_cast<std::size_t>(c)];
    }
    return {GeneratorMatrix::validate(raw), std::nullopt};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("generator: ") + e.what());
  }
}

FreezingSchedule parse_schedule(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "schedule must be an object");
  const auto kind = get_or<std::string>(j, "kind", "");
  try {
    RemainderSpec remainder = j.contains("remainder") ? parse_remainder(j.at("remainder")) : RemainderSpec{};
    if (kind == "power_law") {
      return FreezingSchedule(PowerLaw{get_or<double>(j, "a", 1.0), get_or<double>(j, "theta", 0.5)}, remainder);
    }
    if (kind == "critical") return FreezingSchedule(Critical{get_or<double>(j, "a", 1.0)}, remainder);
    if (kind == "log_power") return FreezingSchedule(LogPower{get_or<double>(j, "zeta", 1.0)}, remainder);
    if (kind == "constant") return FreezingSchedule(ConstantPlus{get_or<double>(j, "p", 1.0), 0.0, 1.0}, remainder);
    if (kind == "constant_plus") {
      return FreezingSchedule(ConstantPlus{get_or<double>(j, "limit", 0.5), get_or<double>(j, "excess", 0.0),
                                           get_or<double>(j, "rate", 1.0)},
                              remainder);
    }
    if (kind == "tabulated") {
      return FreezingSchedule(
          Tabulated{get_or<std::int64_t>(j, "first_index", 1), number_list(require_key(j, "values"), "values")},
          remainder);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("schedule: ") + e.what());
  }
  throw Error(ErrorCode::ConfigError, "unknown schedule kind '" + kind + "'");
}

std::string git_blob_sha1(std::string_view content) {
  const std::string head = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, head.data(), head.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorCode::InvalidArgument, "SHA-1 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned k = 0; k < length; ++k) {
    const unsigned char c = digest[k];
    out.push_back(hex[c >> 4]);
    out.push_back(hex[c & 15]);
  }
  return out;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string config_hash(const Json& j) { return git_blob_sha1(canonical_dump(j)); }

Json make_manifest(std::string_view command, const Json& resolved, std::uint64_t seed, unsigned threads,
                   const std::vector<std::string>& outputs) {
  return {{"command", command},     {"config", resolved}, {"config_hash", config_hash(resolved)},
          {"seed", seed},           {"threads", threads}, {"outputs", outputs}};
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::ConfigError, "write failed for " + path.string());
}

}  // namespace freezing
