#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "galv/catalog/types.hpp"
#include "galv/query/range_set.hpp"

namespace galv::api {

using Json = nlohmann::json;

/// Malformed request body or response field.
class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const catalog::User& user);
Json to_json(const catalog::Institution& institution);
/// {id, name, test_date, dataset_type, institution, sample_count}
Json to_json(const catalog::Dataset& dataset, const std::string& institution_name);
/// {column_id, name, type, unit}
Json to_json(const catalog::ColumnInfo& column);
/// {key, sample_range: {start, end}, value_text}
Json to_json(const catalog::MiscRecord& record);
Json to_json(SampleRange range);
Json to_json(const catalog::HarvesterReport& report);
Json to_json(const catalog::HarvesterStatus& status);

catalog::HarvesterReport harvester_report_from_json(const Json& j);

/// Parses {start, end}; throws CodecError unless 0 <= start <= end.
SampleRange range_from_json(const Json& j);
/// Parses a list of ranges into canonical form.
query::RangeSet range_set_from_json(const Json& j);

Json parse_json(const std::string& body);

// Field access that throws CodecError with the field name.
const Json& require(const Json& j, const char* key);
std::string require_string(const Json& j, const char* key);
std::int64_t require_int(const Json& j, const char* key);
std::optional<std::string> optional_string(const Json& j, const char* key);
std::optional<std::int64_t> optional_int(const Json& j, const char* key);
bool optional_bool(const Json& j, const char* key, bool fallback);

}  // namespace galv::api
