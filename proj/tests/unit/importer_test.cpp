#include <gtest/gtest.h>

#include <bit>
#include <thread>

#include "galv/harvester/daemon.hpp"
#include "galv/harvester/importer.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"
#include "support/test_server.hpp"

namespace galv::harvester {
namespace {

using galv::testing::TempDir;
using galv::testing::TestServer;
using ingest::Format;

constexpr const char* kRoot = "/lab";

// Passes calls through after failing the first `failures` with a transport error.
class FlakyUploader final : public Uploader {
 public:
  FlakyUploader(Uploader& inner, int failures) : inner_(inner), failures_(failures) {}

  api::CreatedDataset create_dataset(const api::DatasetUpload& u) override {
    trip();
    return inner_.create_dataset(u);
  }
  std::vector<api::ColumnSummary> columns(DatasetId d) override { return inner_.columns(d); }
  std::int64_t upload_samples(std::span<const query::ColumnFrame> f) override {
    trip();
    return inner_.upload_samples(f);
  }
  void put_misc(DatasetId d, const std::string& k, SampleRange r, const std::string& v) override {
    inner_.put_misc(d, k, r, v);
  }
  void report(const catalog::HarvesterReport& r) override { inner_.report(r); }

 private:
  void trip() {
    if (failures_ > 0) {
      --failures_;
      throw api::TransportError("simulated outage");
    }
  }
  Uploader& inner_;
  int failures_;
};

// Thrown from the after-batch hook to stop an import dead, like a kill.
struct SimulatedCrash {};

class Rig {
 public:
  Rig() {
    auto admin = server.admin_client();
    admin.create_institution("Oxford");
    admin.create_user({"harvest", "harvest-pw", false, false});
    config.server_endpoint = server.endpoint();
    config.username = "harvest";
    config.secret = "harvest-pw";
    config.stability_threshold = 1;
    config.scan_period = Seconds{0.01};
    config.upload_batch_rows = 100;
    config.retry_base = Seconds{0.0};
    config.harvester_name = "test-pc";
    config.paths = {{kRoot, "Oxford", "harvest"}};
    config.state_file = dir / "state.json";
  }

  UploaderFactory factory() {
    return [this] { return std::make_unique<HttpUploader>(config.server_endpoint, "harvest", "harvest-pw"); };
  }

  Harvester harvester(HarvesterOptions options = {}) { return Harvester(config, fs, factory(), std::move(options)); }

  ObservedFile tracked(const std::string& rel) {
    auto state = load_state(config.state_file);
    return state.files.at({kRoot, rel});
  }

  TestServer server;
  TempDir dir;
  MemoryFileSystem fs;
  HarvesterConfig config;
};

std::string fixture(Format format, std::size_t rows, std::uint64_t seed = 1, std::size_t first = 0) {
  auto table = galv::testing::random_table(4, rows, seed);
  if (first == 0) return galv::testing::render_fixture(format, galv::testing::sample_metadata(format, "cellA"), table);
  return galv::testing::render_rows(format, table, first, rows);
}

std::string header_only(Format format) {
  return galv::testing::render_fixture(format, galv::testing::sample_metadata(format, "cellA"),
                                       galv::testing::Table(4));
}

TEST(ImporterTest, FreshFixtureImportsEveryRow) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 1000));
  auto h = rig.harvester();
  h.run_cycle();
  auto r = h.run_cycle();
  EXPECT_EQ(r.imported, 1u);
  auto f = rig.tracked("cellA.tsv");
  EXPECT_EQ(f.state, FileState::Imported);
  EXPECT_EQ(f.imported_row_count, 1000);
  EXPECT_EQ(f.imported_byte_offset, f.last_seen_size);
  auto ds = rig.server.catalog().search_datasets(rig.server.admin());
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].sample_count, 1000);
  EXPECT_EQ(ds[0].dataset_type, "MCR-TSV");
  auto misc = rig.server.catalog().get_misc_data(rig.server.admin(), ds[0].id);
  ASSERT_EQ(misc.size(), 1u);
  EXPECT_EQ(misc[0].key, "todays_date");
}

TEST(ImporterTest, ValuesArriveBitExact) {
  Rig rig;
  auto table = galv::testing::random_table(4, 300, 9);
  rig.fs.write(kRoot, "run.csv", galv::testing::render_fixture(Format::GenCsv, galv::testing::sample_metadata(Format::GenCsv, "run"), table));
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  auto& cat = rig.server.catalog();
  auto ds = cat.search_datasets(rig.server.admin());
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].name, "run");
  auto cols = cat.get_columns(rig.server.admin(), ds[0].id);
  ASSERT_EQ(cols.size(), 4u);
  for (std::size_t c = 0; c < 4; ++c) {
    auto samples = cat.read_samples(rig.server.admin(), ds[0].id, cols[c].column.id, {0, 300});
    ASSERT_EQ(samples.size(), 300u);
    for (std::size_t i = 0; i < 300; ++i)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(samples[i].value), std::bit_cast<std::uint64_t>(table[c][i]));
  }
}

TEST(ImporterTest, RedundantImportUploadsNothing) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 250));
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  auto before = rig.server.catalog().dump();
  auto f = rig.tracked("cellA.tsv");

  HttpUploader up(rig.config.server_endpoint, "harvest", "harvest-pw");
  int batches = 0;
  ImportContext ctx{rig.config, rig.fs, up};
  ctx.after_batch = [&] { ++batches; };
  auto again = import_file(f, rig.config.paths[0], ctx);
  EXPECT_EQ(batches, 0);
  EXPECT_EQ(again.state, FileState::Imported);
  EXPECT_EQ(again.imported_byte_offset, f.imported_byte_offset);
  EXPECT_EQ(rig.server.catalog().dump(), before);
}

TEST(ImporterTest, GrowingFileMatchesSingleShotIngest) {
  Rig grown, single;
  auto full = fixture(Format::IvmTxt, 1000, 3);
  auto half = full.substr(0, full.size() / 2);
  half = half.substr(0, half.rfind('\n') + 1);
  grown.fs.write(kRoot, "cellA.txt", half);
  single.fs.write(kRoot, "cellA.txt", full);
  auto when = std::filesystem::file_time_type::clock::now();
  grown.fs.set_modified(kRoot, "cellA.txt", when);
  single.fs.set_modified(kRoot, "cellA.txt", when);

  auto g = grown.harvester();
  g.run_cycle();
  g.run_cycle();
  grown.fs.append(kRoot, "cellA.txt", full.substr(half.size()));
  grown.fs.set_modified(kRoot, "cellA.txt", when);
  g.run_cycle();
  EXPECT_EQ(grown.tracked("cellA.txt").state, FileState::Imported);
  EXPECT_EQ(grown.tracked("cellA.txt").imported_row_count, 1000);

  auto s = single.harvester();
  s.run_cycle();
  s.run_cycle();
  EXPECT_EQ(grown.server.catalog().dump(), single.server.catalog().dump());
}

TEST(ImporterTest, MalformedAppendedRowFailsAndKeepsEarlierRows) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.csv", fixture(Format::GenCsv, 120));
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  rig.fs.append(kRoot, "cellA.csv", "1,2,3,4\n5,6,seven,8\n9,10,11,12\n");
  h.run_cycle();
  auto f = rig.tracked("cellA.csv");
  EXPECT_EQ(f.state, FileState::Failed);
  ASSERT_TRUE(f.failure_reason);
  EXPECT_NE(f.failure_reason->find("parse"), std::string::npos);
  EXPECT_EQ(f.imported_row_count, 121);
  auto ds = rig.server.catalog().search_datasets(rig.server.admin());
  EXPECT_EQ(ds[0].sample_count, 121);
}

TEST(ImporterTest, UnrecognizedFileIsMarkedAndSkipped) {
  Rig rig;
  rig.fs.write(kRoot, "notes.md", "# lab notes\nnothing tabular here\n");
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  EXPECT_EQ(rig.tracked("notes.md").state, FileState::Unrecognized);
  EXPECT_TRUE(rig.server.catalog().search_datasets(rig.server.admin()).empty());
}

TEST(ImporterTest, UnterminatedLastLineWaitsForItsNewline) {
  Rig rig;
  auto body = fixture(Format::GenCsv, 10);
  rig.fs.write(kRoot, "cellA.csv", body + "1,2,3");
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  auto f = rig.tracked("cellA.csv");
  EXPECT_EQ(f.state, FileState::Imported);
  EXPECT_EQ(f.imported_row_count, 10);
  EXPECT_EQ(f.imported_byte_offset, body.size());
  rig.fs.append(kRoot, "cellA.csv", ",4\n");
  h.run_cycle();
  EXPECT_EQ(rig.tracked("cellA.csv").imported_row_count, 11);
}

TEST(ImporterTest, NetworkErrorsBackOffExponentially) {
  Rig rig;
  rig.config.retry_base = Seconds{1.0};
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 50));
  HttpUploader real(rig.config.server_endpoint, "harvest", "harvest-pw");

  std::vector<double> slept;
  ObservedFile f;
  f.root_path = kRoot;
  f.relative_path = "cellA.tsv";
  f.state = FileState::Stable;
  f.last_seen_size = rig.fs.stat(kRoot, "cellA.tsv")->size;

  FlakyUploader flaky(real, 2);
  ImportContext ctx{rig.config, rig.fs, flaky};
  ctx.sleep = [&](Seconds s) { slept.push_back(s.count()); };
  auto done = import_file(f, rig.config.paths[0], ctx);
  EXPECT_EQ(done.state, FileState::Imported);
  EXPECT_EQ(slept, (std::vector<double>{1.0, 2.0}));

  slept.clear();
  FlakyUploader dead(real, 1000);
  ImportContext dctx{rig.config, rig.fs, dead};
  dctx.sleep = [&](Seconds s) { slept.push_back(s.count()); };
  f.relative_path = "other.tsv";
  rig.fs.write(kRoot, "other.tsv", fixture(Format::McrTsv, 50, 2));
  auto failed = import_file(f, rig.config.paths[0], dctx);
  EXPECT_EQ(failed.state, FileState::Failed);
  EXPECT_TRUE(failed.transient_failure);
  EXPECT_EQ(slept, (std::vector<double>{1.0, 2.0, 4.0, 8.0}));
}

TEST(ImporterTest, HttpErrorsAreNotRetried) {
  Rig rig;
  rig.config.paths[0].owner = "admin";
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 10));
  int sleeps = 0;
  HarvesterOptions opt;
  opt.sleep = [&](Seconds) { ++sleeps; };
  auto h = rig.harvester(opt);
  h.run_cycle();
  h.run_cycle();
  auto f = rig.tracked("cellA.tsv");
  EXPECT_EQ(f.state, FileState::Failed);
  EXPECT_FALSE(f.transient_failure);
  EXPECT_NE(f.failure_reason->find("403"), std::string::npos);
}

TEST(ImporterTest, ServerOutageRetriedOnNextCycle) {
  Rig rig;
  rig.config.retry_attempts = 1;
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 10));
  HttpUploader real(rig.config.server_endpoint, "harvest", "harvest-pw");
  int outage = 1;
  Harvester h(rig.config, rig.fs, [&]() -> std::unique_ptr<Uploader> {
    return std::make_unique<FlakyUploader>(real, outage > 0 ? outage-- : 0);
  });
  h.run_cycle();
  h.run_cycle();
  EXPECT_EQ(rig.tracked("cellA.tsv").state, FileState::Failed);
  h.run_cycle();
  EXPECT_EQ(rig.tracked("cellA.tsv").state, FileState::Imported);
}

// Every crash point, in process: the import dies right after the server
// accepts batch k, a fresh harvester resumes from the state file, and the
// catalog ends identical to an uninterrupted run.
TEST(ImporterTest, CrashAfterAnyBatchResumesToIdenticalCatalog) {
  auto body = fixture(Format::McrTsv, 1000, 4);
  auto when = std::filesystem::file_time_type::clock::now();
  std::string reference;
  {
    Rig rig;
    rig.fs.write(kRoot, "cellA.tsv", body);
    auto h = rig.harvester();
    h.run_cycle();
    h.run_cycle();
    reference = rig.server.catalog().dump();
  }
  for (int crash_at = 1; crash_at <= 10; ++crash_at) {
    Rig rig;
    rig.fs.write(kRoot, "cellA.tsv", body);
    rig.fs.set_modified(kRoot, "cellA.tsv", when);
    int batches = 0;
    HarvesterOptions opt;
    opt.after_batch = [&] {
      if (++batches == crash_at) throw SimulatedCrash{};
    };
    {
      auto h = rig.harvester(opt);
      h.run_cycle();
      EXPECT_THROW(h.run_cycle(), SimulatedCrash);
    }
    auto h = rig.harvester();
    h.run_cycle();
    EXPECT_EQ(rig.tracked("cellA.tsv").state, FileState::Imported) << crash_at;
    EXPECT_EQ(rig.server.catalog().dump(), reference) << "crash after batch " << crash_at;
  }
}

TEST(DaemonTest, ConcurrentWorkersImportEveryFile) {
  Rig rig;
  rig.config.workers = 2;
  rig.fs.write(kRoot, "a/cellA.tsv", fixture(Format::McrTsv, 300, 1));
  rig.fs.write(kRoot, "b/cellB.txt", fixture(Format::IvmTxt, 300, 2));
  rig.fs.write(kRoot, "c/cellC.csv", fixture(Format::GenCsv, 300, 3));
  auto h = rig.harvester();
  h.run_cycle();
  auto r = h.run_cycle();
  EXPECT_EQ(r.actions, 3u);
  EXPECT_EQ(r.imported, 3u);
  for (const auto& d : rig.server.catalog().search_datasets(rig.server.admin()))
    EXPECT_EQ(d.sample_count, 300);
}

TEST(DaemonTest, StateIsMirroredToServer) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 10));
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  auto reports = rig.server.catalog().harvester_reports(rig.server.admin());
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].harvester_name, "test-pc");
  EXPECT_EQ(reports[0].reported_by, "harvest");
  ASSERT_EQ(reports[0].observed_paths.size(), 1u);
  EXPECT_EQ(reports[0].observed_paths[0].state, "IMPORTED");
}

TEST(DaemonTest, EmptyDirectoryIdlesWithStableStateFile) {
  Rig rig;
  rig.config.scan_period = Seconds{10.0};
  auto h = rig.harvester();
  h.run_cycle();
  auto first = galv::testing::read_file(rig.config.state_file);
  std::atomic<bool> stop{false};
  int cycles = 0;
  HarvesterOptions opt;
  opt.sleep = [&](Seconds) {
    if (++cycles > 5) stop = true;
  };
  Harvester looping(rig.config, rig.fs, rig.factory(), opt);
  looping.run(stop);
  EXPECT_EQ(galv::testing::read_file(rig.config.state_file), first);
  EXPECT_TRUE(load_state(rig.config.state_file).files.empty());
}

TEST(DaemonTest, RunLoopImportsNewFileWithinThreePeriods) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.tsv", fixture(Format::McrTsv, 20));
  std::atomic<bool> stop{false};
  Harvester h(rig.config, rig.fs, rig.factory());
  std::thread t([&] { h.run(stop); });
  auto imported = [&] {
    auto st = h.state();
    auto it = st.files.find({kRoot, "cellA.tsv"});
    return it != st.files.end() && it->second.state == FileState::Imported;
  };
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds{20};
  while (!imported() && std::chrono::steady_clock::now() < deadline)
    std::this_thread::sleep_for(std::chrono::milliseconds{5});
  stop = true;
  t.join();
  EXPECT_EQ(rig.tracked("cellA.tsv").state, FileState::Imported);
}

TEST(DaemonTest, HeaderOnlyFileImportsZeroRowsThenGrows) {
  Rig rig;
  rig.fs.write(kRoot, "cellA.csv", header_only(Format::GenCsv));
  auto h = rig.harvester();
  h.run_cycle();
  h.run_cycle();
  EXPECT_EQ(rig.tracked("cellA.csv").state, FileState::Imported);
  EXPECT_EQ(rig.tracked("cellA.csv").imported_row_count, 0);
  rig.fs.append(kRoot, "cellA.csv", "1,2,3,4\n");
  h.run_cycle();
  EXPECT_EQ(rig.tracked("cellA.csv").imported_row_count, 1);
}

}  // namespace
}  // namespace galv::harvester
