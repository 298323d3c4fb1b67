#include "galv/api/json_codec.hpp"

#include <vector>

namespace galv::api {

Json parse_json(const std::string& body) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw CodecError(std::string("malformed JSON: ") + e.what());
  }
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw CodecError(std::string("missing field ") + key);
  return j.at(key);
}

std::string require_string(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) throw CodecError(std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::int64_t require_int(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw CodecError(std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return require_string(j, key);
}

std::optional<std::int64_t> optional_int(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return require_int(j, key);
}

bool optional_bool(const Json& j, const char* key, bool fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_boolean()) throw CodecError(std::string(key) + " must be a boolean");
  return j.at(key).get<bool>();
}

Json to_json(const catalog::User& user) {
  return {{"id", raw(user.id)},
          {"username", user.username},
          {"is_admin", user.is_admin},
          {"is_read_only", user.is_read_only}};
}

Json to_json(const catalog::Institution& institution) {
  return {{"id", raw(institution.id)}, {"name", institution.name}};
}

Json to_json(const catalog::Dataset& d, const std::string& institution_name) {
  return {{"id", raw(d.id)},
          {"name", d.name},
          {"test_date", format_iso_date(d.test_date)},
          {"dataset_type", d.dataset_type},
          {"institution", institution_name},
          {"sample_count", d.sample_count}};
}

Json to_json(const catalog::ColumnInfo& c) {
  return {{"column_id", raw(c.column.id)},
          {"name", c.column.name},
          {"type", c.type.name},
          {"unit", c.type.unit}};
}

Json to_json(SampleRange range) { return {{"start", range.start}, {"end", range.end}}; }

Json to_json(const catalog::MiscRecord& r) {
  return {{"key", r.key}, {"sample_range", to_json(r.sample_range)}, {"value_text", r.value_text}};
}

namespace {

Json observed_to_json(const catalog::ObservedPathReport& o) {
  Json j = {{"root_path", o.root_path},
            {"relative_path", o.relative_path},
            {"state", o.state},
            {"last_seen_size", o.last_seen_size},
            {"stable_scan_count", o.stable_scan_count},
            {"imported_byte_offset", o.imported_byte_offset},
            {"imported_row_count", o.imported_row_count},
            {"dataset_id", nullptr},
            {"failure_reason", nullptr}};
  if (o.dataset_id) j["dataset_id"] = *o.dataset_id;
  if (o.failure_reason) j["failure_reason"] = *o.failure_reason;
  return j;
}

Json monitored_to_json(const catalog::MonitoredPathReport& m) {
  return {{"root_path", m.root_path}, {"owner", m.owner}, {"institution", m.institution}};
}

Json lists_to_json(const std::vector<catalog::MonitoredPathReport>& monitored,
                   const std::vector<catalog::ObservedPathReport>& observed) {
  Json j = Json::object();
  j["monitored_paths"] = Json::array();
  for (const auto& m : monitored) j["monitored_paths"].push_back(monitored_to_json(m));
  j["observed_paths"] = Json::array();
  for (const auto& o : observed) j["observed_paths"].push_back(observed_to_json(o));
  return j;
}

}  // namespace

Json to_json(const catalog::HarvesterReport& report) {
  Json j = lists_to_json(report.monitored_paths, report.observed_paths);
  j["harvester_name"] = report.harvester_name;
  return j;
}

Json to_json(const catalog::HarvesterStatus& status) {
  Json j = lists_to_json(status.monitored_paths, status.observed_paths);
  j["harvester_name"] = status.harvester_name;
  j["reported_by"] = status.reported_by;
  j["reported_at"] = status.reported_at;
  return j;
}

catalog::HarvesterReport harvester_report_from_json(const Json& j) {
  catalog::HarvesterReport r;
  r.harvester_name = require_string(j, "harvester_name");
  if (j.contains("monitored_paths")) {
    const auto& list = j.at("monitored_paths");
    if (!list.is_array()) throw CodecError("monitored_paths must be an array");
    for (const auto& m : list) {
      r.monitored_paths.push_back({require_string(m, "root_path"),
                                   optional_string(m, "owner").value_or(""),
                                   optional_string(m, "institution").value_or("")});
    }
  }
  if (j.contains("observed_paths")) {
    const auto& list = j.at("observed_paths");
    if (!list.is_array()) throw CodecError("observed_paths must be an array");
    for (const auto& o : list) {
      catalog::ObservedPathReport p;
      p.root_path = require_string(o, "root_path");
      p.relative_path = require_string(o, "relative_path");
      p.state = require_string(o, "state");
      p.last_seen_size = optional_int(o, "last_seen_size").value_or(0);
      p.stable_scan_count = optional_int(o, "stable_scan_count").value_or(0);
      p.imported_byte_offset = optional_int(o, "imported_byte_offset").value_or(0);
      p.imported_row_count = optional_int(o, "imported_row_count").value_or(0);
      p.dataset_id = optional_int(o, "dataset_id");
      p.failure_reason = optional_string(o, "failure_reason");
      r.observed_paths.push_back(std::move(p));
    }
  }
  return r;
}

SampleRange range_from_json(const Json& j) {
  auto start = require_int(j, "start");
  auto end = require_int(j, "end");
  if (start < 0 || start > end)
    throw CodecError("invalid range [" + std::to_string(start) + "," + std::to_string(end) + ")");
  return SampleRange{start, end};
}

query::RangeSet range_set_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (!j.is_array()) throw CodecError("held must be an array of ranges");
  std::vector<SampleRange> ranges;
  ranges.reserve(j.size());
  for (const auto& r : j) ranges.push_back(range_from_json(r));
  return query::RangeSet::normalize(ranges);
}

}  // namespace galv::api
