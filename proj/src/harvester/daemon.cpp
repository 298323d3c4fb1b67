#include "galv/harvester/daemon.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <sstream>
#include <thread>

namespace galv::harvester {
namespace {

void default_sleep(Seconds s) { std::this_thread::sleep_for(s); }

bool due_for_rows(const ObservedFile& f) {
  return f.dataset_id && (f.state == FileState::Importing || f.state == FileState::Stable ||
                          f.state == FileState::Growing);
}

}  // namespace

Harvester::Harvester(HarvesterConfig config, FileSystem& fs, UploaderFactory uploaders,
                     HarvesterOptions options)
    : config_(std::move(config)),
      fs_(fs),
      uploaders_(std::move(uploaders)),
      options_(std::move(options)),
      state_(load_state(config_.state_file)) {
  if (!options_.sleep) options_.sleep = default_sleep;
}

HarvesterState Harvester::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void Harvester::persist_locked() { save_state(config_.state_file, state_); }

void Harvester::checkpoint(const ObservedFile& file) {
  std::lock_guard lock(mutex_);
  state_.files[key_of(file)] = file;
  persist_locked();
}

const MonitoredPath* Harvester::path_for(const std::string& root) const {
  for (const auto& p : config_.paths)
    if (p.root_path == root) return &p;
  return nullptr;
}

Uploader& Harvester::uploader(std::size_t i) {
  while (pool_.size() <= i) pool_.push_back(uploaders_());
  return *pool_[i];
}

void Harvester::mirror_state(Uploader& uploader) {
  try {
    uploader.report(to_report(config_, state()));
  } catch (const std::exception& e) {
    options_.log(std::string("state mirror upload failed: ") + e.what());
  }
}

CycleReport Harvester::run_cycle() {
  CycleReport report;
  std::set<std::string> ignored;
  auto state_file = std::filesystem::absolute(config_.state_file).lexically_normal();
  ignored.insert(state_file.string());
  ignored.insert(state_file.string() + ".tmp");

  ScanResult scan;
  {
    std::lock_guard lock(mutex_);
    scan = scan_once(config_, state_, fs_, ignored);
    persist_locked();
  }
  for (const auto& w : scan.warnings) options_.log("scan warning: " + w);
  report.warnings = scan.warnings;
  report.actions = scan.actions.size();

  Uploader* primary = nullptr;
  try {
    primary = &uploader(0);
  } catch (const std::exception& e) {
    options_.log(std::string("cannot create server client: ") + e.what());
  }

  auto snapshot = [this](const ImportAction& a) {
    std::lock_guard lock(mutex_);
    return state_.files.at({a.root_path, a.relative_path});
  };
  auto store = [this](const ObservedFile& f) { checkpoint(f); };

  if (primary && !scan.actions.empty()) {
    // Datasets are created in scan order so catalog ids do not depend on
    // worker scheduling.
    ImportContext ctx{config_, fs_, *primary, store, options_.after_batch, options_.sleep, options_.log};
    for (const auto& a : scan.actions) {
      const auto* path = path_for(a.root_path);
      if (!path) continue;
      store(prepare_dataset(snapshot(a), *path, ctx));
    }

    std::vector<ImportAction> rows;
    for (const auto& a : scan.actions)
      if (due_for_rows(snapshot(a))) rows.push_back(a);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&](Uploader& up) {
      ImportContext wctx{config_, fs_, up, store, options_.after_batch, options_.sleep, options_.log};
      for (auto i = next++; i < rows.size(); i = next++) {
        try {
          store(import_rows(snapshot(rows[i]), wctx));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };

    auto n_workers = std::min(config_.workers, rows.size());
    if (n_workers <= 1) {
      worker(*primary);
    } else {
      std::vector<Uploader*> ups{primary};
      for (std::size_t w = 1; w < n_workers; ++w) {
        try {
          ups.push_back(&uploader(w));
        } catch (const std::exception&) {
          break;
        }
      }
      std::vector<std::thread> threads;
      for (auto* up : ups) threads.emplace_back(worker, std::ref(*up));
      for (auto& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
  }

  if (primary) mirror_state(*primary);

  std::lock_guard lock(mutex_);
  persist_locked();
  report.tracked = state_.files.size();
  for (const auto& a : scan.actions) {
    const auto& f = state_.files.at({a.root_path, a.relative_path});
    if (f.state == FileState::Imported) ++report.imported;
    if (f.state == FileState::Failed) ++report.failed;
  }
  return report;
}

void Harvester::run(const std::atomic<bool>& stop) {
  using clock = std::chrono::steady_clock;
  while (!stop) {
    auto started = clock::now();
    auto r = run_cycle();
    if (r.actions > 0)
      options_.log("cycle: " + std::to_string(r.actions) + " imports, " + std::to_string(r.imported) +
                   " imported, " + std::to_string(r.failed) + " failed");
    auto deadline = started + std::chrono::duration_cast<clock::duration>(config_.scan_period);
    while (!stop && clock::now() < deadline) {
      auto left = std::chrono::duration<double>(deadline - clock::now());
      options_.sleep(std::min(left, Seconds{0.1}));
    }
  }
}

catalog::HarvesterReport to_report(const HarvesterConfig& config, const HarvesterState& state) {
  catalog::HarvesterReport r;
  r.harvester_name = config.harvester_name;
  for (const auto& p : config.paths) r.monitored_paths.push_back({p.root_path, p.owner, p.institution});
  for (const auto& [key, f] : state.files) {
    catalog::ObservedPathReport o;
    o.root_path = f.root_path;
    o.relative_path = f.relative_path;
    o.state = std::string(to_string(f.state));
    o.last_seen_size = static_cast<std::int64_t>(f.last_seen_size);
    o.stable_scan_count = f.stable_scan_count;
    o.imported_byte_offset = static_cast<std::int64_t>(f.imported_byte_offset);
    o.imported_row_count = f.imported_row_count;
    o.dataset_id = f.dataset_id;
    o.failure_reason = f.failure_reason;
    r.observed_paths.push_back(std::move(o));
  }
  return r;
}

std::string format_status(const HarvesterState& state) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"ROOT", "FILE", "STATE", "SIZE", "OFFSET", "ROWS", "DATASET", "REASON"});
  for (const auto& [key, f] : state.files) {
    rows.push_back({f.root_path, f.relative_path, std::string(to_string(f.state)),
                    std::to_string(f.last_seen_size), std::to_string(f.imported_byte_offset),
                    std::to_string(f.imported_row_count),
                    f.dataset_id ? std::to_string(*f.dataset_id) : "-", f.failure_reason.value_or("")});
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

  std::ostringstream out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

}  // namespace galv::harvester
