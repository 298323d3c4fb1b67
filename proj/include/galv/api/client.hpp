#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "galv/api/json_codec.hpp"
#include "galv/catalog/types.hpp"
#include "galv/query/range_set.hpp"
#include "galv/query/wire.hpp"

namespace galv::api {

/// The server could not be reached or the connection broke mid-request.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The server answered with a non-2xx status.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, std::string body);

  int status() const noexcept { return status_; }
  /// The "error" field of the JSON body, or empty.
  const std::string& code() const noexcept { return code_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string code_;
  std::string body_;
};

struct HttpResult {
  int status = 0;
  /// Body with any gzip content-coding undone.
  std::string body;
  std::string content_encoding;
  std::size_t transfer_bytes = 0;
};

struct LoginResult {
  std::string token;
  std::string expires_at;
  catalog::User user;
};

struct DatasetSummary {
  DatasetId id{};
  std::string name;
  std::string test_date;
  std::string dataset_type;
  std::string institution;
  std::int64_t sample_count = 0;
};

struct ColumnSummary {
  ColumnId column_id{};
  std::string name;
  std::string type;
  std::string unit;
};

struct SearchQuery {
  std::optional<std::string> name;
  std::optional<std::string> from;
  std::optional<std::string> to;
  std::optional<std::string> type;
};

struct DatasetUpload {
  std::string name;
  std::string test_date;
  std::string dataset_type;
  std::string institution;
  std::optional<std::string> owner;
  std::vector<catalog::ColumnSpec> columns;
};

struct CreatedDataset {
  DatasetId id{};
  std::vector<ColumnSummary> columns;
  /// True when the dataset already existed and is being reused.
  bool existed = false;
};

struct FetchResult {
  std::vector<query::ColumnFrame> frames;
  /// Size of the GVLA message after any content-coding is undone.
  std::size_t payload_bytes = 0;
  /// Size of the response body as transferred.
  std::size_t transfer_bytes = 0;
  bool gzip = false;
};

/// Blocking client for the HTTP API. One request in flight per instance.
class ApiClient {
 public:
  /// `endpoint` is "http://host:port" or "host:port".
  explicit ApiClient(const std::string& endpoint,
                     std::chrono::milliseconds timeout = std::chrono::seconds{30});
  ApiClient(ApiClient&&) noexcept;
  ApiClient& operator=(ApiClient&&) noexcept;
  ~ApiClient();

  void set_token(std::string token);
  const std::string& token() const noexcept;

  // Raw exchanges; non-2xx statuses are returned, not thrown.
  HttpResult get(const std::string& path);
  HttpResult post_json(const std::string& path, const Json& body);
  HttpResult post_bytes(const std::string& path, std::span<const std::uint8_t> body,
                        bool accept_gzip = false);

  LoginResult login(const std::string& username, const std::string& password);

  /// The /api/datasets body exactly as the server sent it.
  std::string search_datasets_raw(const SearchQuery& query);
  std::vector<DatasetSummary> search_datasets(const SearchQuery& query);
  std::vector<ColumnSummary> columns(DatasetId dataset);
  std::vector<catalog::MiscRecord> misc(DatasetId dataset,
                                        std::optional<SampleRange> range = std::nullopt);

  FetchResult fetch(DatasetId dataset, std::span<const ColumnId> columns, SampleRange range,
                    const query::RangeSet& held = {}, bool accept_gzip = true);

  /// Creates the dataset, or returns the visible existing one on conflict.
  CreatedDataset create_dataset(const DatasetUpload& upload);
  std::int64_t upload_samples(std::span<const query::ColumnFrame> frames);
  void put_misc(DatasetId dataset, const std::string& key, SampleRange range,
                const std::string& value_text);

  catalog::User create_user(const catalog::NewUser& user);
  void grant(DatasetId dataset, const std::string& username);
  catalog::Institution create_institution(const std::string& name);
  void report_harvester(const catalog::HarvesterReport& report);
  Json harvesters();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Query string for /api/datasets, without leading '?'.
std::string encode_search(const SearchQuery& query);

}  // namespace galv::api
