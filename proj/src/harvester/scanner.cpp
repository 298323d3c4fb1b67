#include "galv/harvester/scanner.hpp"

#include <algorithm>
#include <tuple>

namespace galv::harvester {
namespace {

constexpr const char* kTruncated = "truncated";

void fail_truncated(ObservedFile& f) {
  f.state = FileState::Failed;
  f.failure_reason = kTruncated;
  f.transient_failure = false;
}

void reobserve(ObservedFile& f, std::uint64_t size) {
  f.state = FileState::Observed;
  f.last_seen_size = size;
  f.stable_scan_count = 0;
}

// Advances one tracked file; returns true when it is due for import.
bool step(ObservedFile& f, std::uint64_t size, int threshold) {
  const bool changed = size != f.last_seen_size;
  const bool started = f.imported_byte_offset > 0 || f.imported_row_count > 0 || f.dataset_id;

  if (size < f.imported_byte_offset && f.state != FileState::Failed) {
    f.last_seen_size = size;
    fail_truncated(f);
    return false;
  }

  switch (f.state) {
    case FileState::Observed:
      if (changed) {
        reobserve(f, size);
        return false;
      }
      if (++f.stable_scan_count < threshold) return false;
      f.state = FileState::Stable;
      return true;

    case FileState::Stable:
      if (changed && !started) {
        reobserve(f, size);
        return false;
      }
      f.last_seen_size = size;
      return true;

    case FileState::Importing:
    case FileState::Growing:
      f.last_seen_size = size;
      return true;

    case FileState::Imported:
      if (size > f.last_seen_size) {
        f.last_seen_size = size;
        f.state = FileState::Growing;
        return true;
      }
      f.last_seen_size = size;
      return false;

    case FileState::Failed: {
      // Truncation needs a human decision; only request_retry clears it.
      const bool retry = (f.transient_failure || changed) && f.failure_reason != kTruncated;
      f.last_seen_size = size;
      if (!retry || size < f.imported_byte_offset) return false;
      f.failure_reason.reset();
      f.transient_failure = false;
      if (started) {
        f.state = FileState::Growing;
        return true;
      }
      if (changed) {
        reobserve(f, size);
        return false;
      }
      f.state = FileState::Stable;
      return true;
    }

    case FileState::Unrecognized:
      if (changed) reobserve(f, size);
      return false;
  }
  return false;
}

}  // namespace

ScanResult scan_once(const HarvesterConfig& config, HarvesterState& state, FileSystem& fs,
                     const std::set<std::string>& ignored) {
  ScanResult result;
  for (const auto& path : config.paths) {
    auto listing = fs.list(path.root_path);
    for (auto& w : listing.warnings) result.warnings.push_back(std::move(w));
    for (const auto& entry : listing.files) {
      if (ignored.count(path.root_path + "/" + entry.relative_path)) continue;
      FileKey key{path.root_path, entry.relative_path};
      auto it = state.files.find(key);
      if (it == state.files.end()) {
        ObservedFile f;
        f.root_path = path.root_path;
        f.relative_path = entry.relative_path;
        f.last_seen_size = entry.size;
        state.files.emplace(key, std::move(f));
        continue;
      }
      if (step(it->second, entry.size, config.stability_threshold))
        result.actions.push_back({key.first, key.second, it->second.imported_byte_offset});
    }
  }
  std::sort(result.actions.begin(), result.actions.end(), [](const auto& a, const auto& b) {
    return std::tie(a.root_path, a.relative_path) < std::tie(b.root_path, b.relative_path);
  });
  return result;
}

bool request_retry(ObservedFile& f) {
  if (f.state != FileState::Failed) return false;
  f.failure_reason.reset();
  f.transient_failure = false;
  const bool started = f.imported_byte_offset > 0 || f.imported_row_count > 0 || f.dataset_id;
  f.state = started ? FileState::Growing : FileState::Stable;
  return true;
}

}  // namespace galv::harvester
