#include "galv/harvester/importer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "galv/ingest/format.hpp"

namespace galv::harvester {
namespace {

constexpr std::size_t kHeaderBytes = 64 * 1024;
constexpr std::size_t kReadChunk = 1 << 20;

void mark_failed(ObservedFile& f, std::string reason, bool transient) {
  f.state = FileState::Failed;
  f.failure_reason = std::move(reason);
  f.transient_failure = transient;
}

void default_sleep(Seconds s) { std::this_thread::sleep_for(s); }

// Network errors are retried with exponential backoff; anything else,
// including HTTP error statuses, propagates at once.
template <class Fn>
auto with_retry(ImportContext& ctx, const std::string& what, Fn&& fn) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const api::TransportError& e) {
      if (attempt >= ctx.config.retry_attempts) throw;
      auto delay = ctx.config.retry_base * std::pow(2.0, attempt - 1);
      ctx.log(what + " failed (" + e.what() + "), retrying in " + std::to_string(delay.count()) + " s");
      (ctx.sleep ? ctx.sleep : default_sleep)(delay);
    }
  }
}

struct LoadedHeader {
  ingest::Format format = ingest::Format::Unrecognized;
  ingest::HeaderResult header;
};

std::string file_name(const std::string& relative) {
  auto slash = relative.rfind('/');
  return slash == std::string::npos ? relative : relative.substr(slash + 1);
}

// Sniffs and parses the header of the file as of last_seen_size.
LoadedHeader load_header(const ObservedFile& f, ImportContext& ctx) {
  auto limit = std::min<std::uint64_t>(kHeaderBytes, f.last_seen_size);
  auto prefix = ctx.fs.read(f.root_path, f.relative_path, 0, static_cast<std::size_t>(limit));
  LoadedHeader out;
  out.format = ingest::sniff(prefix, f.relative_path);
  if (out.format == ingest::Format::Unrecognized) return out;

  ingest::SourceInfo source{file_name(f.relative_path), {}};
  if (auto st = ctx.fs.stat(f.root_path, f.relative_path)) source.modified = utc_date_of(st->modified);
  out.header = ingest::parse_header(out.format, prefix, source);
  return out;
}

// Runs body, turning every failure into a FAILED file.
template <class Body>
ObservedFile guarded(ObservedFile f, ImportContext& ctx, Body&& body) {
  try {
    body(f);
  } catch (const api::TransportError& e) {
    mark_failed(f, std::string("network: ") + e.what(), true);
  } catch (const api::ApiError& e) {
    mark_failed(f, std::string("server: ") + e.what(), e.status() >= 500);
  } catch (const ingest::ParseFailure& e) {
    mark_failed(f, "parse: " + e.error().describe(), false);
  } catch (const std::exception& e) {
    mark_failed(f, std::string("error: ") + e.what(), false);
  }
  if (f.state == FileState::Failed)
    ctx.log(f.root_path + "/" + f.relative_path + ": " + f.failure_reason.value_or(""));
  return f;
}

std::vector<query::ColumnFrame> to_frames(DatasetId dataset, const std::vector<ColumnId>& columns,
                                          ingest::RowBatch& batch) {
  std::vector<query::ColumnFrame> frames;
  frames.reserve(columns.size());
  auto n = static_cast<std::int64_t>(batch.row_count());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    frames.push_back({dataset, columns[c], {batch.first_sample_no, batch.first_sample_no + n},
                      std::move(batch.values_per_column[c])});
  }
  return frames;
}

}  // namespace

HttpUploader::HttpUploader(const std::string& endpoint, std::string username, std::string secret)
    : client_(endpoint), username_(std::move(username)), secret_(std::move(secret)) {}

template <class Fn>
auto HttpUploader::authed(Fn&& fn) {
  if (client_.token().empty()) client_.login(username_, secret_);
  try {
    return fn();
  } catch (const api::ApiError& e) {
    if (e.status() != 401) throw;
    client_.login(username_, secret_);
    return fn();
  }
}

api::CreatedDataset HttpUploader::create_dataset(const api::DatasetUpload& upload) {
  return authed([&] { return client_.create_dataset(upload); });
}

std::vector<api::ColumnSummary> HttpUploader::columns(DatasetId dataset) {
  return authed([&] { return client_.columns(dataset); });
}

std::int64_t HttpUploader::upload_samples(std::span<const query::ColumnFrame> frames) {
  return authed([&] { return client_.upload_samples(frames); });
}

void HttpUploader::put_misc(DatasetId dataset, const std::string& key, SampleRange range,
                            const std::string& value_text) {
  authed([&] { client_.put_misc(dataset, key, range, value_text); });
}

void HttpUploader::report(const catalog::HarvesterReport& report) {
  authed([&] { client_.report_harvester(report); });
}

ObservedFile prepare_dataset(ObservedFile file, const MonitoredPath& path, ImportContext& ctx) {
  if (file.dataset_id) return file;
  return guarded(std::move(file), ctx, [&](ObservedFile& f) {
    auto loaded = load_header(f, ctx);
    if (loaded.format == ingest::Format::Unrecognized) {
      f.state = FileState::Unrecognized;
      return;
    }
    f.state = FileState::Importing;
    ctx.checkpoint(f);

    const auto& meta = loaded.header.metadata;
    api::DatasetUpload upload;
    upload.name = meta.dataset_name;
    upload.test_date = format_iso_date(meta.test_date);
    upload.dataset_type = meta.dataset_type.empty() ? std::string(ingest::tag(loaded.format)) : meta.dataset_type;
    upload.institution = path.institution;
    upload.owner = path.owner;
    for (const auto& c : meta.declared_columns) upload.columns.push_back({c.name, c.type_name, c.unit});

    auto created = with_retry(ctx, "create dataset", [&] { return ctx.uploader.create_dataset(upload); });
    if (created.columns.size() != meta.declared_columns.size()) {
      mark_failed(f, "existing dataset " + std::to_string(raw(created.id)) + " has different columns", false);
      return;
    }
    for (const auto& m : meta.misc) {
      with_retry(ctx, "upload metadata", [&] {
        ctx.uploader.put_misc(created.id, m.key, SampleRange{0, 0}, m.value_text);
      });
    }
    f.dataset_id = raw(created.id);
    ctx.checkpoint(f);
  });
}

ObservedFile import_rows(ObservedFile file, ImportContext& ctx) {
  if (!file.dataset_id) {
    mark_failed(file, "no dataset", false);
    return file;
  }
  return guarded(std::move(file), ctx, [&](ObservedFile& f) {
    auto loaded = load_header(f, ctx);
    if (loaded.format == ingest::Format::Unrecognized) {
      mark_failed(f, "format no longer recognized", false);
      return;
    }
    const auto& meta = loaded.header.metadata;
    DatasetId dataset{*f.dataset_id};

    auto summaries = with_retry(ctx, "list columns", [&] { return ctx.uploader.columns(dataset); });
    if (summaries.size() != meta.declared_columns.size()) {
      mark_failed(f, "dataset " + std::to_string(*f.dataset_id) + " has different columns", false);
      return;
    }
    std::vector<ColumnId> columns;
    for (const auto& s : summaries) columns.push_back(s.column_id);

    f.state = FileState::Importing;
    ctx.checkpoint(f);

    ingest::ParseCursor cursor{std::max<std::uint64_t>(f.imported_byte_offset, loaded.header.cursor.byte_offset),
                               f.imported_row_count};
    ingest::RowLimits limits{ctx.config.upload_batch_rows, ctx.config.upload_batch_rows};
    std::size_t chunk = kReadChunk;
    while (cursor.byte_offset < f.last_seen_size) {
      auto want = static_cast<std::size_t>(std::min<std::uint64_t>(chunk, f.last_seen_size - cursor.byte_offset));
      auto bytes = ctx.fs.read(f.root_path, f.relative_path, cursor.byte_offset, want);
      auto result = ingest::parse_rows(loaded.format, meta, cursor, bytes, limits);

      for (auto& batch : result.batches) {
        if (batch.row_count() == 0) continue;
        auto frames = to_frames(dataset, columns, batch);
        with_retry(ctx, "upload rows", [&] { return ctx.uploader.upload_samples(frames); });
        ctx.after_batch();
        f.imported_byte_offset = result.cursor.byte_offset;
        f.imported_row_count = result.cursor.rows_emitted;
        ctx.checkpoint(f);
      }
      f.imported_byte_offset = result.cursor.byte_offset;
      f.imported_row_count = result.cursor.rows_emitted;

      if (result.error) {
        mark_failed(f, "parse: " + result.error->describe(), false);
        ctx.checkpoint(f);
        return;
      }
      if (result.cursor.byte_offset == cursor.byte_offset) {
        // A line longer than the window, or an unterminated tail.
        if (bytes.size() == want && want == chunk) {
          chunk *= 2;
          continue;
        }
        break;
      }
      cursor = result.cursor;
    }
    f.state = FileState::Imported;
    f.failure_reason.reset();
    f.transient_failure = false;
    ctx.checkpoint(f);
  });
}

ObservedFile import_file(ObservedFile file, const MonitoredPath& path, ImportContext& ctx) {
  file = prepare_dataset(std::move(file), path, ctx);
  if (file.state == FileState::Failed || file.state == FileState::Unrecognized) return file;
  return import_rows(std::move(file), ctx);
}

}  // namespace galv::harvester
