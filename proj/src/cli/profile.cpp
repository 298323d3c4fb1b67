#include "galv/cli/profile.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace galv::cli {
namespace {

using nlohmann::json;

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

std::string_view to_string(OutputFormat format) noexcept {
  switch (format) {
    case OutputFormat::Table: return "table";
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
  }
  return "table";
}

std::optional<OutputFormat> output_format_from_string(std::string_view text) noexcept {
  for (auto f : {OutputFormat::Table, OutputFormat::Json, OutputFormat::Csv})
    if (to_string(f) == text) return f;
  return std::nullopt;
}

std::filesystem::path default_profile_path() {
  if (const char* p = std::getenv("GALV_PROFILE"); p && *p) return p;
  const char* home = std::getenv("HOME");
  std::filesystem::path base = home && *home ? home : ".";
  return base / ".config" / "galv" / "profile.json";
}

Profile load_profile(const std::filesystem::path& path) {
  Profile p;
  std::ifstream in(path);
  if (!in) return p;
  try {
    json j;
    in >> j;
    if (auto s = opt_string(j, "server_endpoint")) p.server_endpoint = *s;
    p.token = opt_string(j, "token");
    p.username = opt_string(j, "username");
    p.expires_at = opt_string(j, "expires_at");
    if (auto f = opt_string(j, "output_format")) {
      auto parsed = output_format_from_string(*f);
      if (!parsed) throw ProfileError("unknown output_format " + *f + " in " + path.string());
      p.output_format = *parsed;
    }
  } catch (const json::exception& e) {
    throw ProfileError("malformed profile " + path.string() + ": " + e.what());
  }
  return p;
}

void save_profile(const std::filesystem::path& path, const Profile& p) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);

  json j = {{"server_endpoint", p.server_endpoint},
            {"token", p.token ? json(*p.token) : json(nullptr)},
            {"username", p.username ? json(*p.username) : json(nullptr)},
            {"expires_at", p.expires_at ? json(*p.expires_at) : json(nullptr)},
            {"output_format", std::string(to_string(p.output_format))}};
  auto text = j.dump(2) + "\n";

  auto tmp = path.string() + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) throw ProfileError("cannot write " + tmp + ": " + std::strerror(errno));
  ::fchmod(fd, 0600);
  const char* data = text.data();
  std::size_t left = text.size();
  while (left > 0) {
    auto n = ::write(fd, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw ProfileError("cannot write " + tmp + ": " + std::strerror(errno));
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }
  ::close(fd);
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ProfileError("cannot replace " + path.string() + ": " + std::strerror(errno));
}

}  // namespace galv::cli
