#include "galv/api/server_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace galv::api {
namespace {

std::string resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty() || value == ":memory:") return value;
  std::string_view v = value;
  std::string prefix;
  if (v.rfind("sqlite:", 0) == 0) {
    prefix = "sqlite:";
    v.remove_prefix(prefix.size());
  }
  std::filesystem::path p{std::string(v)};
  if (p.is_relative()) p = base / p;
  return prefix + p.lexically_normal().string();
}

std::chrono::seconds parse_seconds(const std::string& text) {
  std::int64_t n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || ptr != text.data() + text.size() || n <= 0)
    throw ConfigError("token TTL must be a positive integer number of seconds: " + text);
  return std::chrono::seconds{n};
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

void apply_bind(ServerConfig& config, const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("bind must be host:port: " + bind);
  int port = 0;
  const char* first = bind.data() + colon + 1;
  const char* last = bind.data() + bind.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc{} || ptr != last || port < 0 || port > 65535)
    throw ConfigError("bad port in bind address: " + bind);
  config.bind_host = bind.substr(0, colon);
  config.bind_port = port;
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  ServerConfig config;
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path{"."};

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  try {
    if (j.contains("bind")) apply_bind(config, j.at("bind").get<std::string>());
    if (j.contains("catalog")) config.catalog = resolve(base, j.at("catalog").get<std::string>());
    if (j.contains("token_ttl_seconds")) {
      auto n = j.at("token_ttl_seconds").get<std::int64_t>();
      if (n <= 0) throw ConfigError("token_ttl_seconds must be positive");
      config.token_ttl = std::chrono::seconds{n};
    }
    if (j.contains("static_dir"))
      config.static_dir = resolve(base, j.at("static_dir").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }

  if (auto v = env("GALVD_BIND")) apply_bind(config, v);
  if (auto v = env("GALVD_CATALOG")) config.catalog = v;
  if (auto v = env("GALVD_TOKEN_TTL")) config.token_ttl = parse_seconds(v);
  if (auto v = env("GALVD_STATIC_DIR")) config.static_dir = v;
  return config;
}

}  // namespace galv::api
