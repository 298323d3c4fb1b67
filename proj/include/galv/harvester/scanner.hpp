#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "galv/harvester/config.hpp"
#include "galv/harvester/filesystem.hpp"
#include "galv/harvester/state.hpp"

namespace galv::harvester {

struct ImportAction {
  std::string root_path;
  std::string relative_path;
  std::uint64_t resume_offset = 0;

  friend bool operator==(const ImportAction&, const ImportAction&) = default;
};

struct ScanResult {
  /// Ordered by (root_path, relative_path).
  std::vector<ImportAction> actions;
  std::vector<std::string> warnings;
};

/// One polling pass over every monitored root. Files named in `ignored`
/// (absolute paths) are not tracked.
///
/// Transitions, with `s` the size seen now:
///   new                                   -> OBSERVED
///   OBSERVED, s unchanged threshold times -> STABLE + import from 0
///   OBSERVED, s changed                   -> OBSERVED, count reset
///   STABLE, s unchanged                   -> STABLE + import (pending from an earlier cycle)
///   STABLE, s changed                     -> OBSERVED
///   IMPORTED, s grew                      -> GROWING + import from imported_byte_offset
///   IMPORTING or GROWING                  -> import resumes from imported_byte_offset
///   s below imported_byte_offset          -> FAILED "truncated"
///   FAILED, s changed or transient        -> retried
///   UNRECOGNIZED, s changed               -> OBSERVED
ScanResult scan_once(const HarvesterConfig& config, HarvesterState& state, FileSystem& fs,
                     const std::set<std::string>& ignored = {});

/// Re-arms a FAILED file for import on the next cycle. Returns false when
/// the file is not FAILED.
bool request_retry(ObservedFile& file);

}  // namespace galv::harvester
