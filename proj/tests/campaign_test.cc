/* Copyright 2026 The RITFIS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "gtest/gtest.h"
#include "ritfis/campaign.hpp"

namespace ritfis {
namespace {

namespace fs = std::filesystem;

const fs::path kData = RITFIS_DATA_DIR;

// Strips wall-clock fields so reports can be compared byte for byte.
std::string without_timing(nlohmann::ordered_json j) {
  j["metrics"].erase("t_o");
  for (auto& e : j["examples"]) e.erase("elapsed_seconds");
  return j.dump();
}

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ritfis_campaign_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CampaignConfig config(const std::string& name, const fs::path& out) {
    auto c = load_config(kData / name);
    c.output_dir = out;
    return c;
  }

  fs::path dir_;
};

TEST(Sampling, ReservoirIsSeededSortedAndComplete) {
  auto a = reservoir_sample(100, 10, 7);
  EXPECT_EQ(a, reservoir_sample(100, 10, 7));
  EXPECT_NE(a, reservoir_sample(100, 10, 8));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 10u);
  EXPECT_EQ(reservoir_sample(5, 10, 1), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(Sampling, ReservoirIsRoughlyUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t s = 0; s < 2000; ++s)
    for (auto i : reservoir_sample(20, 5, s)) ++hits[i];
  // Expected 500 per index.
  for (int h : hits) {
    EXPECT_GT(h, 400);
    EXPECT_LT(h, 600);
  }
}

TEST(Sampling, ExampleSeedDependsOnSeedAndId) {
  EXPECT_EQ(example_seed(1, "a"), example_seed(1, "a"));
  EXPECT_NE(example_seed(1, "a"), example_seed(2, "a"));
  EXPECT_NE(example_seed(1, "a"), example_seed(1, "b"));
}

TEST_F(CampaignTest, WritesLogAndReports) {
  auto cfg = config("textfooler.toml", dir_ / "out");
  auto report = run_campaign(cfg);
  CampaignPaths paths(cfg.output_dir);
  ASSERT_TRUE(fs::exists(paths.log));
  ASSERT_TRUE(fs::exists(paths.report_json));
  ASSERT_TRUE(fs::exists(paths.report_md));
  EXPECT_EQ(report.metrics.n, 12u);
  EXPECT_EQ(report.campaign.samples.size(), 12u);
  EXPECT_EQ(report.campaign.config_hash, config_fingerprint(cfg));

  std::ifstream in(paths.report_json);
  auto saved = nlohmann::ordered_json::parse(in);
  EXPECT_EQ(saved.dump(), to_json(report).dump());

  std::ifstream meta_in(paths.meta);
  auto rebuilt = report_from_log(paths.log, nlohmann::json::parse(meta_in));
  EXPECT_EQ(to_json(rebuilt).dump(), to_json(report).dump());
}

TEST_F(CampaignTest, ResumeSkipsLoggedSamples) {
  auto full = run_campaign(config("textfooler.toml", dir_ / "full"));

  auto cfg = config("textfooler.toml", dir_ / "resumed");
  RunOptions stop;
  stop.stop_after = 5;
  auto partial = run_campaign(cfg, stop);
  EXPECT_EQ(partial.metrics.n, 5u);

  // Simulate a crash in the middle of a write.
  {
    std::ofstream log(CampaignPaths(cfg.output_dir).log, std::ios::app);
    log << "{\"sample_id\": \"s0";
  }
  auto resumed = run_campaign(cfg);
  EXPECT_EQ(without_timing(to_json(resumed)), without_timing(to_json(full)));
}

TEST_F(CampaignTest, WorkerCountDoesNotChangeOutcomes) {
  auto one = config("textfooler.toml", dir_ / "w1");
  one.workers = 1;
  one.preset = "random";
  auto four = one;
  four.workers = 4;
  four.output_dir = dir_ / "w4";
  EXPECT_EQ(without_timing(to_json(run_campaign(one))), without_timing(to_json(run_campaign(four))));
}

TEST_F(CampaignTest, RefusesForeignOutputDirectory) {
  auto cfg = config("textfooler.toml", dir_ / "out");
  RunOptions stop;
  stop.stop_after = 1;
  run_campaign(cfg, stop);
  cfg.seed += 1;
  EXPECT_THROW(run_campaign(cfg), Error);
}

TEST_F(CampaignTest, UnreachableModelFailsBeforeAnyWork) {
  auto cfg = config("http_example.toml", dir_ / "http");
  cfg.http.base_url = "http://127.0.0.1:9";
  cfg.http.timeout_seconds = 2;
  cfg.cache_dir.reset();
  EXPECT_THROW(run_campaign(cfg), QueryFailed);
  EXPECT_FALSE(fs::exists(CampaignPaths(cfg.output_dir).log));
}

TEST_F(CampaignTest, SampleSizeSelectsSubset) {
  auto cfg = config("textfooler.toml", dir_ / "sub");
  cfg.sample_size = 4;
  auto r = run_campaign(cfg);
  EXPECT_EQ(r.metrics.n, 4u);
  auto res = load_resources(cfg);
  std::vector<std::string> ids;
  for (auto i : res.selection) ids.push_back(res.dataset.samples[i].id);
  EXPECT_EQ(r.campaign.samples, ids);
}

TEST_F(CampaignTest, PplCorpusFromFile) {
  std::ofstream(dir_ / "corpus.txt") << "a good film\nthe film is bad\n";
  auto cfg = config("textfooler.toml", dir_ / "ppl");
  cfg.ppl_corpus = dir_ / "corpus.txt";
  auto r = run_campaign(cfg);
  EXPECT_NE(r.campaign.scorer.find("V=7"), std::string::npos) << r.campaign.scorer;
}

}  // namespace
}  // namespace ritfis
