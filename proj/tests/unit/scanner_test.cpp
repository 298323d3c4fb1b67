#include <gtest/gtest.h>

#include <random>

#include "galv/harvester/scanner.hpp"

namespace galv::harvester {
namespace {

class ScannerTest : public ::testing::Test {
 protected:
  ScannerTest() {
    config.server_endpoint = "http://127.0.0.1:1";
    config.username = "u";
    config.stability_threshold = 2;
    config.paths = {{"/lab", "Oxford", "u"}};
  }

  ScanResult scan() { return scan_once(config, state, fs); }
  ObservedFile& file(const std::string& rel, const std::string& root = "/lab") {
    return state.files.at({root, rel});
  }

  HarvesterConfig config;
  HarvesterState state;
  MemoryFileSystem fs;
};

TEST_F(ScannerTest, NewFileIsObservedWithoutAction) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  auto r = scan();
  EXPECT_TRUE(r.actions.empty());
  EXPECT_EQ(file("a.txt").state, FileState::Observed);
  EXPECT_EQ(file("a.txt").last_seen_size, 100u);
}

TEST_F(ScannerTest, UnchangedForThresholdScansBecomesStableOnce) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_TRUE(scan().actions.empty());
  auto r = scan();
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0], (ImportAction{"/lab", "a.txt", 0}));
  EXPECT_EQ(file("a.txt").state, FileState::Stable);
}

TEST_F(ScannerTest, SizeChangeResetsStabilityCount) {
  fs.write("/lab", "a.txt", "1");
  scan();
  scan();
  fs.append("/lab", "a.txt", "2");
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_EQ(file("a.txt").stable_scan_count, 0);
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_EQ(scan().actions.size(), 1u);
}

TEST_F(ScannerTest, ImportedFileThatGrowsResumesAtOffset) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  scan();
  auto& f = file("a.txt");
  f.state = FileState::Imported;
  f.imported_byte_offset = 100;
  f.dataset_id = 1;
  fs.append("/lab", "a.txt", std::string(50, 'y'));
  auto r = scan();
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].resume_offset, 100u);
  EXPECT_EQ(file("a.txt").state, FileState::Growing);
  EXPECT_EQ(file("a.txt").last_seen_size, 150u);
}

TEST_F(ScannerTest, UnchangedImportedFileIsLeftAlone) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  scan();
  file("a.txt").state = FileState::Imported;
  file("a.txt").imported_byte_offset = 100;
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_EQ(file("a.txt").state, FileState::Imported);
}

TEST_F(ScannerTest, TruncationFailsAndNeedsManualRetry) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  scan();
  file("a.txt").state = FileState::Imported;
  file("a.txt").imported_byte_offset = 100;
  file("a.txt").dataset_id = 4;
  fs.write("/lab", "a.txt", std::string(40, 'x'));
  scan();
  EXPECT_EQ(file("a.txt").state, FileState::Failed);
  EXPECT_EQ(file("a.txt").failure_reason, "truncated");

  fs.write("/lab", "a.txt", std::string(200, 'x'));
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_EQ(file("a.txt").state, FileState::Failed);

  EXPECT_TRUE(request_retry(file("a.txt")));
  auto r = scan();
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].resume_offset, 100u);
}

TEST_F(ScannerTest, FailedFileRetriedWhenSizeChanges) {
  fs.write("/lab", "a.txt", "abc");
  scan();
  file("a.txt").state = FileState::Failed;
  file("a.txt").failure_reason = "parse: bad";
  EXPECT_TRUE(scan().actions.empty());
  fs.append("/lab", "a.txt", "d");
  scan();
  EXPECT_EQ(file("a.txt").state, FileState::Observed);
}

TEST_F(ScannerTest, TransientFailureRetriedEveryCycle) {
  fs.write("/lab", "a.txt", "abc");
  scan();
  auto& f = file("a.txt");
  f.state = FileState::Failed;
  f.failure_reason = "network: down";
  f.transient_failure = true;
  f.dataset_id = 3;
  auto r = scan();
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(file("a.txt").state, FileState::Growing);
}

TEST_F(ScannerTest, UnrecognizedIsTerminalUntilFileChanges) {
  fs.write("/lab", "a.bin", "zzz");
  scan();
  file("a.bin").state = FileState::Unrecognized;
  EXPECT_TRUE(scan().actions.empty());
  EXPECT_EQ(file("a.bin").state, FileState::Unrecognized);
  fs.append("/lab", "a.bin", "z");
  scan();
  EXPECT_EQ(file("a.bin").state, FileState::Observed);
}

TEST_F(ScannerTest, LeftoverImportingStateResumes) {
  fs.write("/lab", "a.txt", std::string(100, 'x'));
  scan();
  file("a.txt").state = FileState::Importing;
  file("a.txt").imported_byte_offset = 30;
  auto r = scan();
  ASSERT_EQ(r.actions.size(), 1u);
  EXPECT_EQ(r.actions[0].resume_offset, 30u);
}

TEST_F(ScannerTest, ActionsAreOrderedByRootThenPath) {
  config.stability_threshold = 1;
  config.paths = {{"/zeta", "Oxford", "u"}, {"/alpha", "Oxford", "u"}};
  for (const char* root : {"/zeta", "/alpha"})
    for (const char* rel : {"b.txt", "a/z.txt", "a.txt"}) fs.write(root, rel, "1");
  scan();
  auto r = scan();
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& a : r.actions) got.emplace_back(a.root_path, a.relative_path);
  auto sorted = got;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(got.size(), 6u);
  EXPECT_EQ(got, sorted);
}

TEST_F(ScannerTest, UnreadableRootIsAWarningNotAFailure) {
  config.paths = {{"/bad", "Oxford", "u"}, {"/lab", "Oxford", "u"}};
  fs.fail_root("/bad");
  fs.write("/lab", "a.txt", "1");
  auto r = scan();
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(state.files.size(), 1u);
}

TEST_F(ScannerTest, IgnoredPathsAreNotTracked) {
  fs.write("/lab", "state.json", "{}");
  fs.write("/lab", "a.txt", "1");
  scan_once(config, state, fs, {"/lab/state.json"});
  EXPECT_EQ(state.files.size(), 1u);
  EXPECT_TRUE(state.files.count({"/lab", "a.txt"}));
}

// No first import while the size changed within the last threshold scans,
// under random write schedules.
TEST_F(ScannerTest, NeverImportsBeforeSizeHeldStableForThreshold) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    state = {};
    config.stability_threshold = 1 + static_cast<int>(rng() % 4);
    fs.write("/lab", "f.txt", "");
    std::vector<std::uint64_t> sizes;
    for (int s = 0; s < 30; ++s) {
      if (rng() % 3 == 0) fs.append("/lab", "f.txt", "x");
      sizes.push_back(fs.stat("/lab", "f.txt")->size);
      auto r = scan();
      if (r.actions.empty()) continue;
      auto t = static_cast<std::size_t>(config.stability_threshold);
      ASSERT_GT(sizes.size(), t);
      for (std::size_t k = sizes.size() - 1 - t; k < sizes.size(); ++k)
        ASSERT_EQ(sizes[k], sizes.back()) << "trial " << trial << " scan " << s;
      break;
    }
  }
}

}  // namespace
}  // namespace galv::harvester
