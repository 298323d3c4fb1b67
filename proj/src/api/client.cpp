#include "galv/api/client.hpp"

#include <httplib.h>

#include "galv/api/gzip.hpp"

namespace galv::api {
namespace {

std::string normalize_endpoint(const std::string& endpoint) {
  if (endpoint.find("://") != std::string::npos) return endpoint;
  return "http://" + endpoint;
}

[[noreturn]] void throw_api_error(const HttpResult& r) {
  std::string code;
  std::string message = "HTTP " + std::to_string(r.status);
  try {
    auto j = Json::parse(r.body);
    if (j.is_object()) {
      if (j.contains("error") && j["error"].is_string()) code = j["error"].get<std::string>();
      if (j.contains("message") && j["message"].is_string())
        message += ": " + j["message"].get<std::string>();
      else if (!code.empty())
        message += ": " + code;
    }
  } catch (const Json::exception&) {
  }
  throw ApiError(r.status, std::move(code), message, r.body);
}

const HttpResult& expect_ok(const HttpResult& r) {
  if (r.status < 200 || r.status >= 300) throw_api_error(r);
  return r;
}

Json body_json(const HttpResult& r) {
  try {
    return Json::parse(r.body);
  } catch (const Json::exception& e) {
    throw CodecError(std::string("server sent malformed JSON: ") + e.what());
  }
}

ColumnSummary column_from_json(const Json& j) {
  return {ColumnId{require_int(j, "column_id")}, require_string(j, "name"),
          require_string(j, "type"), require_string(j, "unit")};
}

catalog::User user_from_json(const Json& j) {
  return {UserId{require_int(j, "id")}, require_string(j, "username"),
          optional_bool(j, "is_admin", false), optional_bool(j, "is_read_only", false)};
}

}  // namespace

ApiError::ApiError(int status, std::string code, const std::string& message, std::string body)
    : std::runtime_error(message), status_(status), code_(std::move(code)), body_(std::move(body)) {}

struct ApiClient::Impl {
  httplib::Client http;
  std::string token;

  Impl(const std::string& endpoint, std::chrono::milliseconds timeout)
      : http(normalize_endpoint(endpoint)) {
    if (!http.is_valid()) throw TransportError("invalid server endpoint: " + endpoint);
    http.set_connection_timeout(timeout);
    http.set_read_timeout(timeout);
    http.set_write_timeout(timeout);
    http.set_decompress(false);
    http.set_keep_alive(true);
  }

  httplib::Headers headers(bool accept_gzip) const {
    httplib::Headers h;
    if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
    if (accept_gzip) h.emplace("Accept-Encoding", "gzip");
    return h;
  }

  HttpResult finish(const httplib::Result& res, const std::string& path) {
    if (!res) {
      throw TransportError("request to " + path + " failed: " + httplib::to_string(res.error()));
    }
    HttpResult r;
    r.status = res->status;
    r.transfer_bytes = res->body.size();
    r.content_encoding = res->get_header_value("Content-Encoding");
    if (r.content_encoding == "gzip") {
      try {
        r.body = gzip_decompress(res->body);
      } catch (const std::runtime_error& e) {
        throw TransportError("corrupt gzip body from " + path + ": " + e.what());
      }
    } else {
      r.body = res->body;
    }
    return r;
  }
};

ApiClient::ApiClient(const std::string& endpoint, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(endpoint, timeout)) {}
ApiClient::ApiClient(ApiClient&&) noexcept = default;
ApiClient& ApiClient::operator=(ApiClient&&) noexcept = default;
ApiClient::~ApiClient() = default;

void ApiClient::set_token(std::string token) { impl_->token = std::move(token); }
const std::string& ApiClient::token() const noexcept { return impl_->token; }

HttpResult ApiClient::get(const std::string& path) {
  return impl_->finish(impl_->http.Get(path, impl_->headers(true)), path);
}

HttpResult ApiClient::post_json(const std::string& path, const Json& body) {
  return impl_->finish(impl_->http.Post(path, impl_->headers(true), body.dump(), "application/json"),
                       path);
}

HttpResult ApiClient::post_bytes(const std::string& path, std::span<const std::uint8_t> body,
                                 bool accept_gzip) {
  auto res = impl_->http.Post(path, impl_->headers(accept_gzip),
                              reinterpret_cast<const char*>(body.data()), body.size(),
                              "application/octet-stream");
  return impl_->finish(res, path);
}

LoginResult ApiClient::login(const std::string& username, const std::string& password) {
  auto j = body_json(expect_ok(post_json("/api/login", {{"username", username}, {"password", password}})));
  LoginResult r{require_string(j, "token"), require_string(j, "expires_at"),
                user_from_json(require(j, "user"))};
  impl_->token = r.token;
  return r;
}

std::string encode_search(const SearchQuery& q) {
  httplib::Params params;
  if (q.name) params.emplace("name", *q.name);
  if (q.from) params.emplace("from", *q.from);
  if (q.to) params.emplace("to", *q.to);
  if (q.type) params.emplace("type", *q.type);
  return httplib::detail::params_to_query_str(params);
}

std::string ApiClient::search_datasets_raw(const SearchQuery& query) {
  auto qs = encode_search(query);
  return expect_ok(get(qs.empty() ? "/api/datasets" : "/api/datasets?" + qs)).body;
}

std::vector<DatasetSummary> ApiClient::search_datasets(const SearchQuery& query) {
  auto j = parse_json(search_datasets_raw(query));
  std::vector<DatasetSummary> out;
  for (const auto& d : j) {
    out.push_back({DatasetId{require_int(d, "id")}, require_string(d, "name"),
                   require_string(d, "test_date"), require_string(d, "dataset_type"),
                   require_string(d, "institution"), require_int(d, "sample_count")});
  }
  return out;
}

std::vector<ColumnSummary> ApiClient::columns(DatasetId dataset) {
  auto j = body_json(expect_ok(get("/api/datasets/" + std::to_string(raw(dataset)) + "/columns")));
  std::vector<ColumnSummary> out;
  for (const auto& c : j) out.push_back(column_from_json(c));
  return out;
}

std::vector<catalog::MiscRecord> ApiClient::misc(DatasetId dataset, std::optional<SampleRange> range) {
  auto path = "/api/datasets/" + std::to_string(raw(dataset)) + "/misc";
  if (range)
    path += "?range_start=" + std::to_string(range->start) + "&range_end=" + std::to_string(range->end);
  auto j = body_json(expect_ok(get(path)));
  std::vector<catalog::MiscRecord> out;
  for (const auto& r : j) {
    out.push_back({dataset, require_string(r, "key"), range_from_json(require(r, "sample_range")),
                   require_string(r, "value_text")});
  }
  return out;
}

FetchResult ApiClient::fetch(DatasetId dataset, std::span<const ColumnId> columns, SampleRange range,
                             const query::RangeSet& held, bool accept_gzip) {
  Json body = {{"dataset_id", raw(dataset)}, {"column_ids", Json::array()}, {"range", to_json(range)},
               {"held", Json::array()}};
  for (auto c : columns) body["column_ids"].push_back(raw(c));
  for (auto r : held) body["held"].push_back(to_json(r));

  auto res = impl_->http.Post("/api/data", impl_->headers(accept_gzip), body.dump(), "application/json");
  auto r = impl_->finish(res, "/api/data");
  expect_ok(r);
  FetchResult out;
  out.payload_bytes = r.body.size();
  out.transfer_bytes = r.transfer_bytes;
  out.gzip = r.content_encoding == "gzip";
  auto* p = reinterpret_cast<const std::uint8_t*>(r.body.data());
  out.frames = query::decode_frames({p, r.body.size()});
  return out;
}

CreatedDataset ApiClient::create_dataset(const DatasetUpload& u) {
  Json body = {{"name", u.name},
               {"test_date", u.test_date},
               {"dataset_type", u.dataset_type},
               {"institution", u.institution},
               {"columns", Json::array()}};
  if (u.owner) body["owner"] = *u.owner;
  for (const auto& c : u.columns)
    body["columns"].push_back({{"name", c.name}, {"type", c.type_name}, {"unit", c.unit}});

  auto r = post_json("/api/ingest/dataset", body);
  CreatedDataset out;
  if (r.status == 409) {
    auto j = body_json(r);
    if (!j.is_object() || !j.contains("dataset_id")) throw_api_error(r);
    out.id = DatasetId{require_int(j, "dataset_id")};
    out.existed = true;
    out.columns = columns(out.id);
    return out;
  }
  auto j = body_json(expect_ok(r));
  out.id = DatasetId{require_int(require(j, "dataset"), "id")};
  for (const auto& c : require(j, "columns")) out.columns.push_back(column_from_json(c));
  return out;
}

std::int64_t ApiClient::upload_samples(std::span<const query::ColumnFrame> frames) {
  auto bytes = query::encode_frames(frames);
  auto j = body_json(expect_ok(post_bytes("/api/ingest/samples", bytes)));
  return require_int(j, "appended");
}

void ApiClient::put_misc(DatasetId dataset, const std::string& key, SampleRange range,
                         const std::string& value_text) {
  expect_ok(post_json("/api/ingest/misc", {{"dataset_id", raw(dataset)},
                                           {"key", key},
                                           {"sample_range", to_json(range)},
                                           {"value_text", value_text}}));
}

catalog::User ApiClient::create_user(const catalog::NewUser& user) {
  auto j = body_json(expect_ok(post_json("/api/admin/users", {{"username", user.username},
                                                              {"password", user.password},
                                                              {"is_admin", user.is_admin},
                                                              {"is_read_only", user.is_read_only}})));
  return user_from_json(j);
}

void ApiClient::grant(DatasetId dataset, const std::string& username) {
  expect_ok(post_json("/api/admin/grants", {{"dataset_id", raw(dataset)}, {"username", username}}));
}

catalog::Institution ApiClient::create_institution(const std::string& name) {
  auto j = body_json(expect_ok(post_json("/api/admin/institutions", {{"name", name}})));
  return {InstitutionId{require_int(j, "id")}, require_string(j, "name")};
}

void ApiClient::report_harvester(const catalog::HarvesterReport& report) {
  expect_ok(post_json("/api/ingest/harvester-state", to_json(report)));
}

Json ApiClient::harvesters() { return body_json(expect_ok(get("/api/admin/harvesters"))); }

}  // namespace galv::api
