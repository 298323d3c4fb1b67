#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "galv/api/server.hpp"
#include "galv/api/server_config.hpp"
#include "galv/cli/commands.hpp"

namespace {

std::string read_password(bool from_stdin) {
  if (!from_stdin) return galv::cli::read_secret_from_terminal("Admin password: ");
  std::string line;
  std::getline(std::cin, line);
  return line;
}

// Blocks SIGINT/SIGTERM in every thread and stops the server from a
// dedicated waiter thread.
int serve(const galv::api::ServerConfig& config) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto catalog = galv::catalog::Catalog::open(config.catalog);
  galv::api::ServerOptions options;
  options.token_ttl = config.token_ttl;
  options.static_dir = config.static_dir;
  galv::api::ApiServer server(catalog, options);
  int port = server.bind(config.bind_host, config.bind_port);
  std::cout << "galvd listening on " << config.bind_host << ':' << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.serve();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"galv API server", "galvd"};
  app.require_subcommand(1);

  std::string config_path, bind;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  serve_cmd->add_option("--config", config_path, "JSON config file")->required();
  serve_cmd->add_option("--bind", bind, "host:port, overriding the config");

  std::string username, catalog_conn;
  bool password_stdin = false;
  auto* init = app.add_subcommand("init-admin", "Create the first admin account");
  init->add_option("--username", username, "Admin username")->required();
  auto* cfg_opt = init->add_option("--config", config_path, "JSON config file naming the catalog");
  init->add_option("--catalog", catalog_conn, "Catalog connection string")->excludes(cfg_opt);
  init->add_flag("--password-stdin", password_stdin, "Read the password from the first line of stdin");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) {
      auto config = galv::api::load_server_config(config_path);
      if (!bind.empty()) galv::api::apply_bind(config, bind);
      return serve(config);
    }
    if (catalog_conn.empty()) {
      catalog_conn = config_path.empty() ? galv::api::ServerConfig{}.catalog
                                         : galv::api::load_server_config(config_path).catalog;
    }
    auto catalog = galv::catalog::Catalog::open(catalog_conn);
    auto password = read_password(password_stdin);
    if (password.empty()) {
      std::cerr << "galvd: empty password\n";
      return 1;
    }
    auto admin = catalog.bootstrap_admin(username, password);
    std::cout << "created admin " << admin.username << " in " << catalog_conn << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "galvd: " << e.what() << '\n';
    return 1;
  }
}
