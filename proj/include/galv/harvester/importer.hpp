#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "galv/api/client.hpp"
#include "galv/harvester/config.hpp"
#include "galv/harvester/filesystem.hpp"
#include "galv/harvester/state.hpp"

namespace galv::harvester {

/// The server operations an import needs.
class Uploader {
 public:
  virtual ~Uploader() = default;

  virtual api::CreatedDataset create_dataset(const api::DatasetUpload& upload) = 0;
  virtual std::vector<api::ColumnSummary> columns(DatasetId dataset) = 0;
  virtual std::int64_t upload_samples(std::span<const query::ColumnFrame> frames) = 0;
  virtual void put_misc(DatasetId dataset, const std::string& key, SampleRange range,
                        const std::string& value_text) = 0;
  virtual void report(const catalog::HarvesterReport& report) = 0;
};

/// Uploader over the HTTP API. Logs in on first use and again once when a
/// token is rejected.
class HttpUploader final : public Uploader {
 public:
  HttpUploader(const std::string& endpoint, std::string username, std::string secret);

  api::CreatedDataset create_dataset(const api::DatasetUpload& upload) override;
  std::vector<api::ColumnSummary> columns(DatasetId dataset) override;
  std::int64_t upload_samples(std::span<const query::ColumnFrame> frames) override;
  void put_misc(DatasetId dataset, const std::string& key, SampleRange range,
                const std::string& value_text) override;
  void report(const catalog::HarvesterReport& report) override;

 private:
  template <class Fn>
  auto authed(Fn&& fn);

  api::ApiClient client_;
  std::string username_;
  std::string secret_;
};

struct ImportContext {
  const HarvesterConfig& config;
  FileSystem& fs;
  Uploader& uploader;
  /// Persists progress; called whenever the file's offsets move.
  std::function<void(const ObservedFile&)> checkpoint = [](const ObservedFile&) {};
  /// Runs after the server accepts a batch and before it is checkpointed.
  std::function<void()> after_batch = [] {};
  std::function<void(Seconds)> sleep = {};
  std::function<void(const std::string&)> log = [](const std::string&) {};
};

/// Sniffs, parses the header and creates (or reuses) the file's dataset.
/// Leaves the file UNRECOGNIZED or FAILED when that is not possible; a
/// file that already has a dataset is returned unchanged.
ObservedFile prepare_dataset(ObservedFile file, const MonitoredPath& path, ImportContext& ctx);

/// Uploads rows from imported_byte_offset up to last_seen_size, one batch
/// of config.upload_batch_rows at a time. Ends IMPORTED, or FAILED with
/// offsets at the last accepted batch.
ObservedFile import_rows(ObservedFile file, ImportContext& ctx);

/// prepare_dataset then import_rows.
ObservedFile import_file(ObservedFile file, const MonitoredPath& path, ImportContext& ctx);

}  // namespace galv::harvester
