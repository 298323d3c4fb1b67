#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "galv/date.hpp"
#include "galv/ids.hpp"
#include "galv/sample_range.hpp"

namespace galv::catalog {

struct Institution {
  InstitutionId id{};
  std::string name;
};

struct User {
  UserId id{};
  std::string username;
  bool is_admin = false;
  bool is_read_only = false;
};

struct Dataset {
  DatasetId id{};
  std::string name;
  Date test_date{};
  std::string dataset_type;
  InstitutionId institution_id{};
  UserId owner_id{};
  std::int64_t sample_count = 0;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ColumnType {
  ColumnTypeId id{};
  std::string name;
  std::string unit;

  friend bool operator==(const ColumnType&, const ColumnType&) = default;
};

struct Column {
  ColumnId id{};
  DatasetId dataset_id{};
  std::string name;
  ColumnTypeId type_id{};

  friend bool operator==(const Column&, const Column&) = default;
};

struct ColumnInfo {
  Column column;
  ColumnType type;
};

/// Column declaration for create_dataset. An empty type_name binds to the
/// "unknown" type.
struct ColumnSpec {
  std::string name;
  std::string type_name;
  std::string unit;
};

struct NewDataset {
  std::string name;
  Date test_date{};
  std::string dataset_type;
  InstitutionId institution_id{};
  UserId owner_id{};
  std::vector<ColumnSpec> columns;
};

struct NewUser {
  std::string username;
  std::string password;
  bool is_admin = false;
  bool is_read_only = false;
};

struct SamplePoint {
  std::int64_t sample_no = 0;
  double value = 0.0;
};

/// Samples for one column, as uploaded.
struct SampleFrame {
  ColumnId column_id{};
  std::vector<SamplePoint> samples;
};

struct DatasetFilter {
  std::optional<std::string> name_substring;
  std::optional<Date> date_from;
  std::optional<Date> date_to;
  std::optional<std::string> dataset_type;
};

struct MiscRecord {
  DatasetId dataset_id{};
  std::string key;
  SampleRange sample_range;
  std::string value_text;

  friend bool operator==(const MiscRecord&, const MiscRecord&) = default;
};

/// One harvester ObservedFile row as mirrored to the server.
struct ObservedPathReport {
  std::string root_path;
  std::string relative_path;
  std::string state;
  std::int64_t last_seen_size = 0;
  std::int64_t stable_scan_count = 0;
  std::int64_t imported_byte_offset = 0;
  std::int64_t imported_row_count = 0;
  std::optional<std::int64_t> dataset_id;
  std::optional<std::string> failure_reason;
};

struct MonitoredPathReport {
  std::string root_path;
  std::string owner;
  std::string institution;
};

struct HarvesterReport {
  std::string harvester_name;
  std::vector<MonitoredPathReport> monitored_paths;
  std::vector<ObservedPathReport> observed_paths;
};

struct HarvesterStatus {
  std::string harvester_name;
  std::string reported_by;
  std::string reported_at;
  std::vector<MonitoredPathReport> monitored_paths;
  std::vector<ObservedPathReport> observed_paths;
};

}  // namespace galv::catalog
