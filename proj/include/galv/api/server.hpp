#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "galv/api/token_store.hpp"
#include "galv/catalog/catalog.hpp"

namespace galv::api {

struct ServerOptions {
  std::chrono::seconds token_ttl{24 * 60 * 60};
  /// Directory served at "/"; empty disables static assets.
  std::string static_dir;
  std::size_t login_failures_per_minute = 5;
  Clock clock = std::chrono::system_clock::now;
};

/// HTTP/1.1 front door over a Catalog. Routes live under /api; JSON is the
/// control plane and GVLA frames the data plane in both directions.
///
///   POST /api/login                     {username, password} -> {token, ...}
///   GET  /api/datasets                  ?name=&from=&to=&type=
///   GET  /api/datasets/{id}/columns
///   GET  /api/datasets/{id}/misc        ?range_start=&range_end=
///   POST /api/data                      {dataset_id, column_ids, range, held} -> GVLA
///   POST /api/ingest/dataset            {name, test_date, dataset_type, institution, columns}
///   POST /api/ingest/samples            GVLA body -> {appended}
///   POST /api/ingest/misc               {dataset_id, key, sample_range, value_text}
///   POST /api/ingest/harvester-state    harvester report
///   POST /api/admin/users | /api/admin/grants | /api/admin/institutions
///   GET  /api/admin/harvesters
class ApiServer {
 public:
  ApiServer(catalog::Catalog& catalog, ServerOptions options = {});
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;
  ~ApiServer();

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop(); blocks.
  void serve();
  /// bind() + serve() on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  TokenStore& tokens();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace galv::api
