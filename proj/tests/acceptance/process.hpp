#pragma once

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace galv::acceptance {

using EnvOverrides = std::map<std::string, std::string>;

struct ProcessResult {
  int exit_code = -1;
  /// Set when the child died from a signal.
  int signal = 0;
  std::string out;
  std::string err;
};

/// Runs argv[0] to completion. Output goes through files in `scratch`.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& scratch,
                          const EnvOverrides& env = {}, const std::string& input = {});

/// A child left running until stop(). The destructor kills it.
class Background {
 public:
  Background(const std::vector<std::string>& argv, const std::filesystem::path& scratch);
  Background(const Background&) = delete;
  Background& operator=(const Background&) = delete;
  ~Background();

  /// Blocks until stdout contains `marker`; returns stdout so far.
  std::string wait_for(const std::string& marker, std::chrono::milliseconds timeout);
  /// SIGTERM, then SIGKILL after `grace`. Returns the exit status.
  int stop(std::chrono::milliseconds grace = std::chrono::seconds{5});

 private:
  pid_t pid_ = -1;
  std::filesystem::path out_;
};

}  // namespace galv::acceptance
