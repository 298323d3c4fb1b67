#include "galv/harvester/filesystem.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace galv::harvester {
namespace fs = std::filesystem;

Listing LocalFileSystem::list(const std::string& root) {
  Listing out;
  std::error_code ec;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) {
    out.warnings.push_back(root + ": " + ec.message());
    return out;
  }
  for (fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
    if (ec) {
      out.warnings.push_back(root + ": " + ec.message());
      break;
    }
    std::error_code fec;
    if (!it->is_regular_file(fec)) continue;
    auto size = it->file_size(fec);
    auto mtime = fec ? fs::file_time_type{} : it->last_write_time(fec);
    auto rel = it->path().lexically_relative(root).generic_string();
    if (fec) {
      out.warnings.push_back(it->path().string() + ": " + fec.message());
      continue;
    }
    out.files.push_back({rel, size, mtime});
  }
  std::sort(out.files.begin(), out.files.end(),
            [](const FileEntry& a, const FileEntry& b) { return a.relative_path < b.relative_path; });
  return out;
}

std::optional<FileEntry> LocalFileSystem::stat(const std::string& root, const std::string& relative) {
  std::error_code ec;
  auto p = fs::path(root) / relative;
  auto size = fs::file_size(p, ec);
  if (ec) return std::nullopt;
  auto mtime = fs::last_write_time(p, ec);
  if (ec) return std::nullopt;
  return FileEntry{relative, size, mtime};
}

std::string LocalFileSystem::read(const std::string& root, const std::string& relative,
                                  std::uint64_t offset, std::size_t max_bytes) {
  auto p = fs::path(root) / relative;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  in.seekg(static_cast<std::streamoff>(offset));
  if (!in) return {};
  std::string out(max_bytes, '\0');
  in.read(out.data(), static_cast<std::streamsize>(max_bytes));
  if (in.bad()) throw std::runtime_error("read failed on " + p.string());
  out.resize(static_cast<std::size_t>(in.gcount()));
  return out;
}

void MemoryFileSystem::write(const std::string& root, const std::string& relative, std::string content) {
  std::lock_guard lock(mutex_);
  auto& f = files_[{root, relative}];
  f.content = std::move(content);
  f.modified = fs::file_time_type::clock::now();
}

void MemoryFileSystem::append(const std::string& root, const std::string& relative,
                              std::string_view content) {
  std::lock_guard lock(mutex_);
  auto& f = files_[{root, relative}];
  f.content.append(content);
  f.modified = fs::file_time_type::clock::now();
}

void MemoryFileSystem::remove(const std::string& root, const std::string& relative) {
  std::lock_guard lock(mutex_);
  files_.erase({root, relative});
}

void MemoryFileSystem::set_modified(const std::string& root, const std::string& relative,
                                    fs::file_time_type when) {
  std::lock_guard lock(mutex_);
  files_.at({root, relative}).modified = when;
}

void MemoryFileSystem::fail_root(const std::string& root, bool failing) {
  std::lock_guard lock(mutex_);
  if (failing)
    failing_.insert(root);
  else
    failing_.erase(root);
}

Listing MemoryFileSystem::list(const std::string& root) {
  std::lock_guard lock(mutex_);
  Listing out;
  if (failing_.count(root)) {
    out.warnings.push_back(root + ": simulated I/O failure");
    return out;
  }
  for (const auto& [key, f] : files_) {
    if (key.first == root) out.files.push_back({key.second, f.content.size(), f.modified});
  }
  return out;
}

std::optional<FileEntry> MemoryFileSystem::stat(const std::string& root, const std::string& relative) {
  std::lock_guard lock(mutex_);
  auto it = files_.find({root, relative});
  if (it == files_.end()) return std::nullopt;
  return FileEntry{relative, it->second.content.size(), it->second.modified};
}

std::string MemoryFileSystem::read(const std::string& root, const std::string& relative,
                                   std::uint64_t offset, std::size_t max_bytes) {
  std::lock_guard lock(mutex_);
  auto it = files_.find({root, relative});
  if (it == files_.end()) throw std::runtime_error("no such file " + root + "/" + relative);
  const auto& c = it->second.content;
  if (offset >= c.size()) return {};
  return c.substr(static_cast<std::size_t>(offset), max_bytes);
}

}  // namespace galv::harvester
