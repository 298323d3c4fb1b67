#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace galv::harvester {

enum class FileState { Observed, Stable, Importing, Imported, Growing, Failed, Unrecognized };

/// "OBSERVED", "STABLE", ...
std::string_view to_string(FileState state) noexcept;
std::optional<FileState> file_state_from_string(std::string_view text) noexcept;

struct ObservedFile {
  std::string root_path;
  std::string relative_path;
  FileState state = FileState::Observed;
  std::uint64_t last_seen_size = 0;
  std::int64_t stable_scan_count = 0;
  std::uint64_t imported_byte_offset = 0;
  std::int64_t imported_row_count = 0;
  std::optional<std::int64_t> dataset_id;
  std::optional<std::string> failure_reason;
  /// FAILED because the server was unreachable; retried every cycle.
  bool transient_failure = false;

  friend bool operator==(const ObservedFile&, const ObservedFile&) = default;
};

using FileKey = std::pair<std::string, std::string>;

inline FileKey key_of(const ObservedFile& f) { return {f.root_path, f.relative_path}; }

/// All tracked files, ordered by (root_path, relative_path).
struct HarvesterState {
  std::map<FileKey, ObservedFile> files;

  friend bool operator==(const HarvesterState&, const HarvesterState&) = default;
};

class StateFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_state(const HarvesterState& state);
HarvesterState parse_state(std::string_view text);

/// A missing file is an empty state. Throws StateFileError.
HarvesterState load_state(const std::filesystem::path& path);
/// Writes via a temporary file and rename so a crash leaves either the old
/// or the new document. Throws StateFileError.
void save_state(const std::filesystem::path& path, const HarvesterState& state);

}  // namespace galv::harvester
