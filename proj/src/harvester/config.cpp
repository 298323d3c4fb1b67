#include "galv/harvester/config.hpp"

#include <unistd.h>

#include <fstream>
#include <set>

#include <json.hpp>

namespace galv::harvester {
namespace {

using nlohmann::json;

std::string absolute_root(const std::filesystem::path& base, const std::string& root) {
  std::filesystem::path p(root);
  if (p.is_relative()) p = base / p;
  p = std::filesystem::absolute(p).lexically_normal();
  auto s = p.string();
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0 || buf[0] == '\0') return "harvester";
  return buf;
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field ") + key + " has the wrong type");
  }
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config is missing ") + key);
  return field<std::string>(j, key, "");
}

}  // namespace

void validate(const HarvesterConfig& c) {
  if (c.server_endpoint.empty()) throw ConfigError("server_endpoint must not be empty");
  if (c.username.empty()) throw ConfigError("username must not be empty");
  if (!(c.scan_period.count() > 0.0)) throw ConfigError("scan_period_seconds must be positive");
  if (c.stability_threshold < 1) throw ConfigError("stability_threshold must be at least 1");
  if (c.upload_batch_rows == 0) throw ConfigError("upload_batch_rows must be positive");
  if (c.workers == 0) throw ConfigError("workers must be positive");
  if (c.retry_attempts < 1) throw ConfigError("retry_attempts must be at least 1");
  if (c.retry_base.count() < 0.0) throw ConfigError("retry_base_seconds must not be negative");
  std::set<std::string> roots;
  for (const auto& p : c.paths) {
    if (!std::filesystem::path(p.root_path).is_absolute())
      throw ConfigError("root_path must be absolute: " + p.root_path);
    if (!roots.insert(p.root_path).second) throw ConfigError("duplicate root_path " + p.root_path);
    if (p.institution.empty()) throw ConfigError("path " + p.root_path + " needs an institution");
    if (p.owner.empty()) throw ConfigError("path " + p.root_path + " needs an owner");
  }
}

HarvesterConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("invalid config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  auto base = std::filesystem::absolute(path).parent_path();
  HarvesterConfig c;
  c.server_endpoint = required_string(j, "server_endpoint");
  c.username = required_string(j, "username");
  c.secret = required_string(j, "secret");
  c.scan_period = Seconds{field<double>(j, "scan_period_seconds", c.scan_period.count())};
  c.stability_threshold = field<int>(j, "stability_threshold", c.stability_threshold);
  c.upload_batch_rows = field<std::size_t>(j, "upload_batch_rows", c.upload_batch_rows);
  c.workers = field<std::size_t>(j, "workers", c.workers);
  c.retry_base = Seconds{field<double>(j, "retry_base_seconds", c.retry_base.count())};
  c.retry_attempts = field<int>(j, "retry_attempts", c.retry_attempts);
  c.harvester_name = field<std::string>(j, "harvester_name", host_name());

  auto state = field<std::string>(j, "state_file", path.stem().string() + ".state.json");
  std::filesystem::path sp(state);
  c.state_file = sp.is_relative() ? (base / sp).lexically_normal() : sp;

  if (j.contains("paths")) {
    if (!j.at("paths").is_array()) throw ConfigError("paths must be an array");
    for (const auto& p : j.at("paths")) {
      if (!p.is_object()) throw ConfigError("each path must be an object");
      c.paths.push_back({absolute_root(base, required_string(p, "root_path")),
                         required_string(p, "institution"), required_string(p, "owner")});
    }
  }
  validate(c);
  return c;
}

}  // namespace galv::harvester
