#include "support/test_server.hpp"

namespace galv::testing {

ManualClock::ManualClock()
    : seconds_(std::make_shared<std::atomic<std::int64_t>>(
          std::chrono::duration_cast<std::chrono::seconds>(
              std::chrono::system_clock::now().time_since_epoch())
              .count())) {}

std::chrono::system_clock::time_point ManualClock::now() const {
  return std::chrono::system_clock::time_point{std::chrono::seconds{seconds_->load()}};
}

void ManualClock::advance(std::chrono::seconds by) { seconds_->fetch_add(by.count()); }

api::Clock ManualClock::as_clock() const {
  return [s = seconds_] { return std::chrono::system_clock::time_point{std::chrono::seconds{s->load()}}; };
}

TestServer::TestServer(TestServerOptions options)
    : catalog_(catalog::Catalog::open(options.catalog, {catalog::PasswordHashing::Minimum})),
      admin_(catalog_.bootstrap_admin("admin", "admin-pw")) {
  api::ServerOptions so;
  so.token_ttl = options.token_ttl;
  so.static_dir = options.static_dir;
  so.clock = clock_.as_clock();
  server_ = std::make_unique<api::ApiServer>(catalog_, so);
  port_ = server_->start("127.0.0.1", 0);
}

TestServer::~TestServer() { server_->stop(); }

std::string TestServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

api::ApiClient TestServer::client(const std::string& username, const std::string& password) {
  api::ApiClient c(endpoint());
  c.login(username, password);
  return c;
}

api::ApiClient TestServer::anonymous_client() { return api::ApiClient(endpoint()); }

}  // namespace galv::testing
