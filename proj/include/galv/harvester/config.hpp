#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace galv::harvester {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Seconds = std::chrono::duration<double>;

struct MonitoredPath {
  /// Absolute, lexically normal, no trailing separator.
  std::string root_path;
  /// Institution name new datasets are filed under.
  std::string institution;
  /// Username that owns datasets created from this path.
  std::string owner;
};

struct HarvesterConfig {
  std::string server_endpoint;
  std::string username;
  std::string secret;
  Seconds scan_period{60.0};
  int stability_threshold = 2;
  std::vector<MonitoredPath> paths;

  std::filesystem::path state_file;
  /// Name under which state is mirrored to the server; the host name by default.
  std::string harvester_name;
  std::size_t upload_batch_rows = 500;
  std::size_t workers = 2;
  Seconds retry_base{1.0};
  int retry_attempts = 5;
};

/// Reads and validates a JSON config. Relative root_path and state_file
/// values resolve against the config file's directory; state_file defaults
/// to "<config stem>.state.json" beside the config.
HarvesterConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError when an invariant does not hold.
void validate(const HarvesterConfig& config);

}  // namespace galv::harvester
