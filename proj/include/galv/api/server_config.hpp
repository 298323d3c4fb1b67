#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace galv::api {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::string bind_host = "127.0.0.1";
  int bind_port = 8080;
  std::string catalog = "galv.db";
  std::chrono::seconds token_ttl{24 * 60 * 60};
  std::string static_dir;
};

/// Reads a JSON config file ({"bind": "host:port", "catalog": ..., "token_ttl_seconds": ...,
/// "static_dir": ...}); GALVD_BIND, GALVD_CATALOG, GALVD_TOKEN_TTL and
/// GALVD_STATIC_DIR override file values. Relative paths resolve against the
/// config file's directory. Throws ConfigError.
ServerConfig load_server_config(const std::filesystem::path& path);

/// Applies "host:port" to config; throws ConfigError on malformed input.
void apply_bind(ServerConfig& config, const std::string& bind);

}  // namespace galv::api
