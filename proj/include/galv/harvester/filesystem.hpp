#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace galv::harvester {

struct FileEntry {
  /// Relative to the root, '/'-separated.
  std::string relative_path;
  std::uint64_t size = 0;
  std::filesystem::file_time_type modified{};
};

struct Listing {
  std::vector<FileEntry> files;
  /// Paths that could not be examined this time.
  std::vector<std::string> warnings;
};

/// The harvester's only view of the disk.
class FileSystem {
 public:
  virtual ~FileSystem() = default;

  /// Every regular file below `root`, recursively, sorted by relative path.
  virtual Listing list(const std::string& root) = 0;
  virtual std::optional<FileEntry> stat(const std::string& root, const std::string& relative) = 0;
  /// Up to `max_bytes` starting at `offset`; shorter at end of file. Throws
  /// std::runtime_error when the file cannot be read.
  virtual std::string read(const std::string& root, const std::string& relative,
                           std::uint64_t offset, std::size_t max_bytes) = 0;
};

class LocalFileSystem final : public FileSystem {
 public:
  Listing list(const std::string& root) override;
  std::optional<FileEntry> stat(const std::string& root, const std::string& relative) override;
  std::string read(const std::string& root, const std::string& relative, std::uint64_t offset,
                   std::size_t max_bytes) override;
};

/// In-memory filesystem for tests. Thread-safe.
class MemoryFileSystem final : public FileSystem {
 public:
  void write(const std::string& root, const std::string& relative, std::string content);
  void append(const std::string& root, const std::string& relative, std::string_view content);
  void remove(const std::string& root, const std::string& relative);
  void set_modified(const std::string& root, const std::string& relative,
                    std::filesystem::file_time_type when);
  /// Makes list() report `root` as unreadable.
  void fail_root(const std::string& root, bool failing = true);

  Listing list(const std::string& root) override;
  std::optional<FileEntry> stat(const std::string& root, const std::string& relative) override;
  std::string read(const std::string& root, const std::string& relative, std::uint64_t offset,
                   std::size_t max_bytes) override;

 private:
  struct File {
    std::string content;
    std::filesystem::file_time_type modified{};
  };
  std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, File> files_;
  std::set<std::string> failing_;
};

}  // namespace galv::harvester
