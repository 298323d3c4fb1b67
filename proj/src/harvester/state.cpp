#include "galv/harvester/state.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace galv::harvester {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<FileState, std::string_view>, 7> kNames{{
    {FileState::Observed, "OBSERVED"},
    {FileState::Stable, "STABLE"},
    {FileState::Importing, "IMPORTING"},
    {FileState::Imported, "IMPORTED"},
    {FileState::Growing, "GROWING"},
    {FileState::Failed, "FAILED"},
    {FileState::Unrecognized, "UNRECOGNIZED"},
}};

}  // namespace

std::string_view to_string(FileState state) noexcept {
  for (auto [s, name] : kNames)
    if (s == state) return name;
  return "UNKNOWN";
}

std::optional<FileState> file_state_from_string(std::string_view text) noexcept {
  for (auto [s, name] : kNames)
    if (name == text) return s;
  return std::nullopt;
}

std::string serialize_state(const HarvesterState& state) {
  json files = json::array();
  for (const auto& [key, f] : state.files) {
    json j = {{"root_path", f.root_path},
              {"relative_path", f.relative_path},
              {"state", std::string(to_string(f.state))},
              {"last_seen_size", f.last_seen_size},
              {"stable_scan_count", f.stable_scan_count},
              {"imported_byte_offset", f.imported_byte_offset},
              {"imported_row_count", f.imported_row_count},
              {"dataset_id", nullptr},
              {"failure_reason", nullptr},
              {"transient_failure", f.transient_failure}};
    if (f.dataset_id) j["dataset_id"] = *f.dataset_id;
    if (f.failure_reason) j["failure_reason"] = *f.failure_reason;
    files.push_back(std::move(j));
  }
  return json{{"version", 1}, {"files", std::move(files)}}.dump(2) + "\n";
}

HarvesterState parse_state(std::string_view text) {
  HarvesterState state;
  try {
    auto doc = json::parse(text);
    if (doc.value("version", 0) != 1) throw StateFileError("unsupported state file version");
    for (const auto& j : doc.at("files")) {
      ObservedFile f;
      f.root_path = j.at("root_path").get<std::string>();
      f.relative_path = j.at("relative_path").get<std::string>();
      auto s = file_state_from_string(j.at("state").get<std::string>());
      if (!s) throw StateFileError("unknown file state " + j.at("state").dump());
      f.state = *s;
      f.last_seen_size = j.at("last_seen_size").get<std::uint64_t>();
      f.stable_scan_count = j.at("stable_scan_count").get<std::int64_t>();
      f.imported_byte_offset = j.at("imported_byte_offset").get<std::uint64_t>();
      f.imported_row_count = j.at("imported_row_count").get<std::int64_t>();
      if (!j.at("dataset_id").is_null()) f.dataset_id = j.at("dataset_id").get<std::int64_t>();
      if (!j.at("failure_reason").is_null())
        f.failure_reason = j.at("failure_reason").get<std::string>();
      f.transient_failure = j.value("transient_failure", false);
      state.files.emplace(key_of(f), std::move(f));
    }
  } catch (const json::exception& e) {
    throw StateFileError(std::string("malformed state file: ") + e.what());
  }
  return state;
}

HarvesterState load_state(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    if (ec) throw StateFileError("cannot stat " + path.string() + ": " + ec.message());
    return {};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateFileError("cannot read state file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_state(ss.str());
}

void save_state(const std::filesystem::path& path, const HarvesterState& state) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StateFileError("cannot write " + tmp.string());
    out << serialize_state(state);
    out.flush();
    if (!out) throw StateFileError("write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StateFileError("cannot replace " + path.string() + ": " + ec.message());
}

}  // namespace galv::harvester
