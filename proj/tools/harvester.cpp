#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "galv/harvester/daemon.hpp"

namespace {

using namespace galv::harvester;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

void log_line(const std::string& line) { std::cerr << "harvester: " << line << std::endl; }

// GALV_FAULT_CRASH_AFTER_BATCHES=N SIGKILLs the process right after the
// server accepts the N-th batch, before it is checkpointed.
std::function<void()> fault_hook() {
  const char* v = std::getenv("GALV_FAULT_CRASH_AFTER_BATCHES");
  if (!v || !*v) return [] {};
  long limit = std::strtol(v, nullptr, 10);
  return [limit, count = 0L]() mutable {
    if (++count >= limit) std::raise(SIGKILL);
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Watches instrument output folders and uploads new data", "harvester"};
  app.require_subcommand(1);

  std::string config_path, file;
  bool once = false;
  auto* run = app.add_subcommand("run", "Scan and import every scan period");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_flag("--once", once, "Run a single cycle and exit");
  auto* status = app.add_subcommand("status", "Print the state table");
  status->add_option("--config", config_path, "JSON config file")->required();
  auto* retry = app.add_subcommand("retry", "Re-arm a FAILED file for the next cycle");
  retry->add_option("--config", config_path, "JSON config file")->required();
  retry->add_option("--file", file, "Path relative to its monitored root")->required();

  CLI11_PARSE(app, argc, argv);

  HarvesterConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "harvester: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*status) {
      std::cout << format_status(load_state(config.state_file));
      return 0;
    }
    if (*retry) {
      auto state = load_state(config.state_file);
      int n = 0;
      for (auto& [key, f] : state.files)
        if (f.relative_path == file && request_retry(f)) ++n;
      if (n == 0) {
        std::cerr << "harvester: no FAILED file " << file << '\n';
        return 1;
      }
      save_state(config.state_file, state);
      std::cout << "re-armed " << n << " file(s)\n";
      return 0;
    }

    LocalFileSystem fs;
    HarvesterOptions options;
    options.log = log_line;
    options.after_batch = fault_hook();
    auto endpoint = config.server_endpoint;
    auto user = config.username;
    auto secret = config.secret;
    Harvester harvester(config, fs, [=] { return std::make_unique<HttpUploader>(endpoint, user, secret); },
                        options);
    if (once) {
      auto r = harvester.run_cycle();
      std::cout << "tracked " << r.tracked << ", imported " << r.imported << ", failed " << r.failed << '\n';
      return 0;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    harvester.run(g_stop);
    return 0;
  } catch (const StateFileError& e) {
    std::cerr << "harvester: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "harvester: " << e.what() << '\n';
    return 1;
  }
}
