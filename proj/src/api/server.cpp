#include "galv/api/server.hpp"

#include <httplib.h>

#include <ctime>
#include <map>
#include <stdexcept>
#include <thread>

#include "galv/api/gzip.hpp"
#include "galv/api/json_codec.hpp"
#include "galv/query/fetch.hpp"
#include "galv/query/wire.hpp"

namespace galv::api {
namespace {

using catalog::CatalogErrc;
using catalog::CatalogError;
using catalog::User;

constexpr const char* kJson = "application/json";
constexpr const char* kOctets = "application/octet-stream";

// Client-visible failure carrying an HTTP status.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message = {}) {
  throw HttpError{status, std::move(code), std::move(message)};
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const HttpError& e) {
  Json body = {{"error", e.code}};
  if (!e.message.empty()) body["message"] = e.message;
  send_json(res, e.status, body);
}

// One body for both invisible and missing datasets.
const HttpError kNoSuchDataset{404, "NotFound", "no such dataset"};

// How PermissionDenied surfaces: readers get 404 so that invisible and
// missing datasets look the same; writers that can see the dataset get 403.
enum class Access { Read, Write, Admin };

int status_for(CatalogErrc code, Access access) {
  switch (code) {
    case CatalogErrc::DuplicateDataset:
    case CatalogErrc::DuplicateUser:
    case CatalogErrc::DuplicateInstitution:
    case CatalogErrc::ConflictingValue:
      return 409;
    case CatalogErrc::ReadOnlyUser:
      return 403;
    case CatalogErrc::PermissionDenied:
      return access == Access::Read ? 404 : 403;
    case CatalogErrc::UnknownDataset:
    case CatalogErrc::UnknownUser:
      return 404;
    case CatalogErrc::UnknownInstitution:
    case CatalogErrc::ForeignColumn:
    case CatalogErrc::RangeOutOfBounds:
    case CatalogErrc::InvalidArgument:
      return 400;
    case CatalogErrc::Storage:
      break;
  }
  return 500;
}

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
  std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t path_id(const httplib::Request& req) {
  try {
    return std::stoll(req.matches[1].str());
  } catch (const std::exception&) {
    throw kNoSuchDataset;
  }
}

std::optional<std::string> query_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  auto v = req.get_param_value(key);
  if (v.empty()) return std::nullopt;
  return v;
}

std::optional<Date> date_param(const httplib::Request& req, const char* key) {
  auto v = query_param(req, key);
  if (!v) return std::nullopt;
  auto d = parse_iso_date(*v);
  if (!d) fail(400, "BadRequest", std::string(key) + " must be an ISO date (YYYY-MM-DD)");
  return d;
}

std::int64_t int_param(const std::string& text, const char* key) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    fail(400, "BadRequest", std::string(key) + " must be an integer");
  return v;
}

std::vector<std::uint8_t> to_bytes(const std::string& s) {
  return {s.begin(), s.end()};
}

}  // namespace

struct ApiServer::Impl {
  using Handler = std::function<void(const User&, const httplib::Request&, httplib::Response&)>;

  catalog::Catalog& catalog;
  ServerOptions options;
  TokenStore tokens;
  LoginLimiter limiter;
  httplib::Server http;
  std::thread thread;
  int port = -1;

  Impl(catalog::Catalog& c, ServerOptions o)
      : catalog(c),
        options(std::move(o)),
        tokens(options.token_ttl, options.clock),
        limiter(options.login_failures_per_minute, std::chrono::seconds{60}, options.clock) {
    routes();
  }

  std::optional<User> bearer_user(const httplib::Request& req) {
    auto header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0)
      return std::nullopt;
    auto id = tokens.authenticate(header.substr(prefix.size()));
    if (!id) return std::nullopt;
    return catalog.find_user(*id);
  }

  // Runs fn and turns every failure into a JSON error response.
  template <class Fn>
  void guarded(httplib::Response& res, Access access, Fn&& fn) {
    try {
      fn();
    } catch (const HttpError& e) {
      send_error(res, e);
    } catch (const CatalogError& e) {
      int status = status_for(e.code(), access);
      if (status == 404 && (e.code() == CatalogErrc::PermissionDenied ||
                            e.code() == CatalogErrc::UnknownDataset)) {
        send_error(res, kNoSuchDataset);
      } else {
        send_error(res, {status, catalog::to_string(e.code()), e.what()});
      }
    } catch (const CodecError& e) {
      send_error(res, {400, "BadRequest", e.what()});
    } catch (const query::WireError& e) {
      send_error(res, {400, "BadFrames", e.what()});
    } catch (const InvalidRange& e) {
      send_error(res, {400, "InvalidRange", e.what()});
    } catch (const std::exception& e) {
      send_error(res, {500, "Internal", e.what()});
    }
  }

  httplib::Server::Handler authed(Access access, Handler fn) {
    return [this, access, fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      guarded(res, access, [&] {
        auto user = bearer_user(req);
        if (!user) fail(401, "Unauthorized", "missing or expired token");
        fn(*user, req, res);
      });
    };
  }

  std::string institution_name(InstitutionId id, std::map<InstitutionId, std::string>& cache) {
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    auto inst = catalog.find_institution(id);
    return cache[id] = inst ? inst->name : std::string{};
  }

  Json dataset_json(const catalog::Dataset& d) {
    std::map<InstitutionId, std::string> cache;
    return to_json(d, institution_name(d.institution_id, cache));
  }

  // Writers of a dataset they cannot see get the same 404 as readers.
  void require_visible(const User& user, DatasetId id) {
    if (!catalog.can_view(user, id)) throw kNoSuchDataset;
  }

  void routes() {
    http.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, Access::Read, [&] { login(req, res); });
    });
    http.Get("/api/datasets", authed(Access::Read, [this](auto& u, auto& req, auto& res) {
               search(u, req, res);
             }));
    http.Get(R"(/api/datasets/(\d+)/columns)",
             authed(Access::Read, [this](auto& u, auto& req, auto& res) { columns(u, req, res); }));
    http.Get(R"(/api/datasets/(\d+)/misc)",
             authed(Access::Read, [this](auto& u, auto& req, auto& res) { misc(u, req, res); }));
    http.Post("/api/data",
              authed(Access::Read, [this](auto& u, auto& req, auto& res) { data(u, req, res); }));
    http.Post("/api/ingest/dataset", authed(Access::Write, [this](auto& u, auto& req, auto& res) {
                ingest_dataset(u, req, res);
              }));
    http.Post("/api/ingest/samples", authed(Access::Write, [this](auto& u, auto& req, auto& res) {
                ingest_samples(u, req, res);
              }));
    http.Post("/api/ingest/misc", authed(Access::Write, [this](auto& u, auto& req, auto& res) {
                ingest_misc(u, req, res);
              }));
    http.Post("/api/ingest/harvester-state",
              authed(Access::Write, [this](auto& u, auto& req, auto& res) {
                catalog.record_harvester_report(u, harvester_report_from_json(parse_json(req.body)));
                send_json(res, 200, Json::object());
              }));
    http.Post("/api/admin/users", authed(Access::Admin, [this](auto& u, auto& req, auto& res) {
                create_user(u, req, res);
              }));
    http.Post("/api/admin/grants",
              authed(Access::Admin, [this](auto& u, auto& req, auto& res) { grant(u, req, res); }));
    http.Post("/api/admin/institutions",
              authed(Access::Admin, [this](auto& u, auto& req, auto& res) {
                auto body = parse_json(req.body);
                send_json(res, 201,
                          to_json(catalog.create_institution(u, require_string(body, "name"))));
              }));
    http.Get("/api/admin/harvesters", authed(Access::Admin, [this](auto& u, auto&, auto& res) {
               Json out = Json::array();
               for (const auto& s : catalog.harvester_reports(u)) out.push_back(to_json(s));
               send_json(res, 200, out);
             }));

    if (!options.static_dir.empty() && !http.set_mount_point("/", options.static_dir))
      throw std::runtime_error("static asset directory does not exist: " + options.static_dir);
  }

  void login(const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    auto username = require_string(body, "username");
    auto password = require_string(body, "password");
    if (limiter.limited(username))
      fail(429, "RateLimited", "too many failed logins; try again later");
    auto user = catalog.authenticate(username, password);
    if (!user) {
      limiter.record_failure(username);
      fail(401, "InvalidCredentials", "invalid username or password");
    }
    auto t = tokens.issue(user->id);
    send_json(res, 200,
              {{"token", t.token},
               {"issued_at", iso_timestamp(t.issued_at)},
               {"expires_at", iso_timestamp(t.expires_at)},
               {"user", to_json(*user)}});
  }

  void search(const User& user, const httplib::Request& req, httplib::Response& res) {
    catalog::DatasetFilter filter;
    filter.name_substring = query_param(req, "name");
    filter.date_from = date_param(req, "from");
    filter.date_to = date_param(req, "to");
    filter.dataset_type = query_param(req, "type");

    std::map<InstitutionId, std::string> cache;
    Json out = Json::array();
    for (const auto& d : catalog.search_datasets(user, filter))
      out.push_back(to_json(d, institution_name(d.institution_id, cache)));
    send_json(res, 200, out);
  }

  void columns(const User& user, const httplib::Request& req, httplib::Response& res) {
    Json out = Json::array();
    for (const auto& c : catalog.get_columns(user, DatasetId{path_id(req)}))
      out.push_back(to_json(c));
    send_json(res, 200, out);
  }

  void misc(const User& user, const httplib::Request& req, httplib::Response& res) {
    auto start = query_param(req, "range_start");
    auto end = query_param(req, "range_end");
    if (start.has_value() != end.has_value())
      fail(400, "BadRequest", "range_start and range_end go together");
    std::optional<SampleRange> range;
    if (start) range = SampleRange::make(int_param(*start, "range_start"), int_param(*end, "range_end"));

    Json out = Json::array();
    for (const auto& r : catalog.get_misc_data(user, DatasetId{path_id(req)}, range))
      out.push_back(to_json(r));
    send_json(res, 200, out);
  }

  void data(const User& user, const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    query::FetchRequest fetch;
    fetch.dataset_id = DatasetId{require_int(body, "dataset_id")};
    const auto& ids = require(body, "column_ids");
    if (!ids.is_array()) throw CodecError("column_ids must be an array");
    for (const auto& id : ids) {
      if (!id.is_number_integer()) throw CodecError("column_ids must hold integers");
      fetch.column_ids.push_back(ColumnId{id.get<std::int64_t>()});
    }
    fetch.requested = range_from_json(require(body, "range"));
    if (body.contains("held")) fetch.held = range_set_from_json(body.at("held"));

    auto frames = query::fetch_frames(catalog, user, fetch);
    auto bytes = query::encode_frames(frames);
    std::string payload(bytes.begin(), bytes.end());
    if (accepts_gzip(req.get_header_value("Accept-Encoding"))) {
      payload = gzip_compress(payload);
      res.set_header("Content-Encoding", "gzip");
    }
    res.set_header("Vary", "Accept-Encoding");
    res.status = 200;
    res.set_content(std::move(payload), kOctets);
  }

  void ingest_dataset(const User& user, const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    catalog::NewDataset nd;
    nd.name = require_string(body, "name");
    auto date = parse_iso_date(require_string(body, "test_date"));
    if (!date) throw CodecError("test_date must be an ISO date (YYYY-MM-DD)");
    nd.test_date = *date;
    nd.dataset_type = optional_string(body, "dataset_type").value_or("");

    if (auto id = optional_int(body, "institution_id")) {
      nd.institution_id = InstitutionId{*id};
      if (!catalog.find_institution(nd.institution_id))
        fail(400, "UnknownInstitution", "no institution with id " + std::to_string(*id));
    } else {
      auto name = require_string(body, "institution");
      auto inst = catalog.find_institution(name);
      if (!inst) fail(400, "UnknownInstitution", "no institution named " + name);
      nd.institution_id = inst->id;
    }

    nd.owner_id = user.id;
    if (auto owner = optional_string(body, "owner"); owner && *owner != user.username) {
      if (!user.is_admin) fail(403, "PermissionDenied", "only admins create datasets for others");
      auto u = catalog.find_user(*owner);
      if (!u) fail(400, "UnknownUser", "no user named " + *owner);
      nd.owner_id = u->id;
    }

    if (body.contains("columns")) {
      const auto& cols = body.at("columns");
      if (!cols.is_array()) throw CodecError("columns must be an array");
      for (const auto& c : cols) {
        nd.columns.push_back({require_string(c, "name"), optional_string(c, "type").value_or(""),
                              optional_string(c, "unit").value_or("")});
      }
    }

    try {
      auto created = catalog.create_dataset(nd);
      Json out = {{"dataset", dataset_json(created)}, {"columns", Json::array()}};
      for (const auto& c : catalog.get_columns(user, created.id)) out["columns"].push_back(to_json(c));
      send_json(res, 201, out);
    } catch (const CatalogError& e) {
      if (e.code() != CatalogErrc::DuplicateDataset) throw;
      Json out = {{"error", to_string(e.code())}, {"message", e.what()}};
      if (auto existing = catalog.find_dataset(user, nd.name, nd.test_date, nd.institution_id))
        out["dataset_id"] = raw(existing->id);
      send_json(res, 409, out);
    }
  }

  void ingest_samples(const User& user, const httplib::Request& req, httplib::Response& res) {
    auto frames = query::decode_frames(to_bytes(req.body));
    if (frames.empty()) {
      send_json(res, 200, {{"appended", 0}});
      return;
    }
    auto dataset = frames.front().dataset_id;
    std::vector<catalog::SampleFrame> batch;
    batch.reserve(frames.size());
    for (auto& f : frames) {
      if (f.dataset_id != dataset) fail(400, "BadFrames", "frames name more than one dataset");
      catalog::SampleFrame sf{f.column_id, {}};
      sf.samples.reserve(f.values.size());
      for (std::size_t i = 0; i < f.values.size(); ++i)
        sf.samples.push_back({f.range.start + static_cast<std::int64_t>(i), f.values[i]});
      batch.push_back(std::move(sf));
    }
    require_visible(user, dataset);
    auto n = catalog.append_samples(dataset, user, batch);
    send_json(res, 200, {{"appended", n}});
  }

  void ingest_misc(const User& user, const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    DatasetId dataset{require_int(body, "dataset_id")};
    auto key = require_string(body, "key");
    auto range = range_from_json(require(body, "sample_range"));
    auto value = require_string(body, "value_text");
    require_visible(user, dataset);
    catalog.put_misc_data(user, dataset, key, range, value);
    send_json(res, 200, Json::object());
  }

  void create_user(const User& actor, const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    catalog::NewUser nu{require_string(body, "username"), require_string(body, "password"),
                        optional_bool(body, "is_admin", false),
                        optional_bool(body, "is_read_only", false)};
    send_json(res, 201, to_json(catalog.create_user(actor, nu)));
  }

  void grant(const User& actor, const httplib::Request& req, httplib::Response& res) {
    auto body = parse_json(req.body);
    DatasetId dataset{require_int(body, "dataset_id")};
    UserId grantee{};
    if (auto id = optional_int(body, "user_id")) {
      grantee = UserId{*id};
    } else {
      auto name = require_string(body, "username");
      auto u = catalog.find_user(name);
      if (!u) fail(404, "UnknownUser", "no user named " + name);
      grantee = u->id;
    }
    catalog.grant_access(actor, dataset, grantee);
    send_json(res, 200, {{"dataset_id", raw(dataset)}, {"user_id", raw(grantee)}});
  }
};

ApiServer::ApiServer(catalog::Catalog& catalog, ServerOptions options)
    : impl_(std::make_unique<Impl>(catalog, std::move(options))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->port = bound;
  return bound;
}

void ApiServer::serve() {
  if (!impl_->http.listen_after_bind()) throw std::runtime_error("server stopped unexpectedly");
}

int ApiServer::start(const std::string& host, int port) {
  int bound = bind(host, port);
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

TokenStore& ApiServer::tokens() { return impl_->tokens; }

}  // namespace galv::api
