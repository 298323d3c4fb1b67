#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "galv/harvester/config.hpp"
#include "galv/harvester/filesystem.hpp"
#include "galv/harvester/importer.hpp"
#include "galv/harvester/scanner.hpp"
#include "galv/harvester/state.hpp"

namespace galv::harvester {

using UploaderFactory = std::function<std::unique_ptr<Uploader>()>;

struct HarvesterOptions {
  std::function<void(Seconds)> sleep;
  std::function<void(const std::string&)> log = [](const std::string&) {};
  std::function<void()> after_batch = [] {};
};

struct CycleReport {
  std::size_t tracked = 0;
  std::size_t actions = 0;
  std::size_t imported = 0;
  std::size_t failed = 0;
  std::vector<std::string> warnings;
};

/// Scan, import and persist loop. The state file is loaded on construction
/// and written after every checkpoint and cycle.
class Harvester {
 public:
  /// Throws StateFileError when the existing state file is unreadable.
  Harvester(HarvesterConfig config, FileSystem& fs, UploaderFactory uploaders,
            HarvesterOptions options = {});

  CycleReport run_cycle();
  /// Cycles every scan_period until `stop` becomes true.
  void run(const std::atomic<bool>& stop);

  HarvesterState state() const;
  const HarvesterConfig& config() const noexcept { return config_; }

 private:
  void persist_locked();
  void checkpoint(const ObservedFile& file);
  void mirror_state(Uploader& uploader);
  const MonitoredPath* path_for(const std::string& root) const;
  /// The i-th pooled uploader, created on first use.
  Uploader& uploader(std::size_t i);

  HarvesterConfig config_;
  FileSystem& fs_;
  UploaderFactory uploaders_;
  std::vector<std::unique_ptr<Uploader>> pool_;
  HarvesterOptions options_;
  mutable std::mutex mutex_;
  HarvesterState state_;
};

/// The ServerReport form of a local state.
catalog::HarvesterReport to_report(const HarvesterConfig& config, const HarvesterState& state);

/// One line per tracked file, aligned.
std::string format_status(const HarvesterState& state);

}  // namespace galv::harvester
