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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"
#include "ritfis/metrics.hpp"

namespace ritfis {
namespace {

SearchOutcome outcome(OutcomeStatus st, std::size_t diff, std::size_t words, std::size_t queries,
                      double seconds) {
  SearchOutcome o;
  o.status = st;
  o.word_diff = diff;
  o.region_words = words;
  o.queries_used = queries;
  o.elapsed_seconds = seconds;
  return o;
}

TEST(Indicators, SuccessRateArithmetic) {
  std::vector<SearchOutcome> v(1000, outcome(OutcomeStatus::kFailed, 0, 10, 5, 1.0));
  for (int i = 0; i < 652; ++i) v[i].status = OutcomeStatus::kSuccess;
  EXPECT_DOUBLE_EQ(success_rate(v), 0.652);
  EXPECT_THROW(success_rate({}), Error);
}

TEST(Indicators, MeansOverSuccessesOnly) {
  std::vector<SearchOutcome> v{outcome(OutcomeStatus::kSuccess, 1, 10, 20, 9.5),
                               outcome(OutcomeStatus::kSuccess, 3, 20, 40, 10.32),
                               outcome(OutcomeStatus::kFailed, 9, 10, 500, 99.0),
                               outcome(OutcomeStatus::kBudgetExhausted, 0, 10, 500, 50.0)};
  EXPECT_DOUBLE_EQ(success_rate(v), 0.5);
  EXPECT_DOUBLE_EQ(*change_rate(v), (0.1 + 0.15) / 2);
  EXPECT_NEAR(*time_overhead(v), 9.910, 1e-12);
  EXPECT_DOUBLE_EQ(*query_number(v), 30.0);
}

TEST(Indicators, UndefinedWithoutSuccesses) {
  std::vector<SearchOutcome> v{outcome(OutcomeStatus::kFailed, 0, 5, 5, 1.0)};
  EXPECT_DOUBLE_EQ(success_rate(v), 0.0);
  EXPECT_FALSE(change_rate(v));
  EXPECT_FALSE(time_overhead(v));
  EXPECT_FALSE(query_number(v));
}

TEST(Indicators, ChangeRateIsScaleFree) {
  std::vector<SearchOutcome> v{outcome(OutcomeStatus::kSuccess, 1, 7, 1, 1),
                               outcome(OutcomeStatus::kSuccess, 2, 9, 1, 1)};
  auto doubled = v;
  doubled.insert(doubled.end(), v.begin(), v.end());
  EXPECT_DOUBLE_EQ(*change_rate(v), *change_rate(doubled));
}

TEST(Perplexity, BigramOracle) {
  NgramScorer s(1.0);
  s.train({"a", "b", "a", "b"});
  EXPECT_EQ(s.vocab_size(), 3u);
  // p(a|<s>) = (1+1)/(1+3), p(b|a) = (2+1)/(2+3)
  const double expected = 1.0 / std::sqrt(0.5 * 0.6);
  EXPECT_NEAR(perplexity(s, {"a", "b"}), expected, 1e-12);
  EXPECT_NEAR(perplexity(s, {"a", "b"}), 1.8257, 1e-4);
}

TEST(Perplexity, UniformLaw) {
  auto s = NgramScorer::uniform(50);
  EXPECT_NEAR(perplexity(s, {"x"}), 50.0, 1e-9);
  EXPECT_NEAR(perplexity(s, {"the", "the", "cat", "!"}), 50.0, 1e-9);
  EXPECT_THROW(perplexity(s, {}), Error);
  EXPECT_THROW(NgramScorer(0.0), Error);
}

TEST(Perplexity, TokensAreLowercased) {
  EXPECT_EQ(ppl_tokens("Good film!"), (std::vector<std::string>{"good", "film", "!"}));
}

OutcomeRecord record(std::size_t index, OutcomeStatus st, std::string original, std::string final_example) {
  OutcomeRecord r;
  r.index = index;
  r.truth = "positive";
  r.original_example = std::move(original);
  r.outcome.sample_id = "id" + std::to_string(index);
  r.outcome.status = st;
  r.outcome.final_example = std::move(final_example);
  r.outcome.final_text = "p " + r.outcome.final_example;
  r.outcome.final_label = st == OutcomeStatus::kSuccess ? "negative" : "positive";
  r.outcome.word_diff = st == OutcomeStatus::kSuccess ? 1 : 0;
  r.outcome.region_words = 2;
  r.outcome.queries_used = 4;
  r.outcome.elapsed_seconds = 0.25;
  r.outcome.score_trace = {0.1, 0.7};
  if (st == OutcomeStatus::kSuccess)
    r.outcome.edits = {{2, EditKind::kSubstitute, "a", "b"}};
  return r;
}

TEST(Report, BuildSortsAndComputes) {
  std::vector<OutcomeRecord> recs{record(1, OutcomeStatus::kFailed, "a a", "a a"),
                                  record(0, OutcomeStatus::kSuccess, "a b", "b b")};
  auto scorer = scorer_from_records(recs);
  auto r = build_report({}, recs, scorer);
  EXPECT_EQ(r.examples[0].index, 0u);
  EXPECT_EQ(r.metrics.n, 2u);
  EXPECT_EQ(r.metrics.n_suc, 1u);
  EXPECT_DOUBLE_EQ(r.metrics.s_rate, 0.5);
  EXPECT_DOUBLE_EQ(*r.metrics.c_rate, 0.5);
  // Trained on "a a" and "a b": V = 3, counts <s>:2, a:2 (a->a 1, a->b 1).
  const double p1 = (0 + 1.0) / (2 + 3.0);  // b | <s>
  const double p2 = (0 + 1.0) / (0 + 3.0);  // b | b
  EXPECT_NEAR(*r.metrics.ppl, 1.0 / std::sqrt(p1 * p2), 1e-9);
}

TEST(Report, JsonRoundTrip) {
  std::vector<OutcomeRecord> recs{record(0, OutcomeStatus::kSuccess, "a b", "b b"),
                                  record(1, OutcomeStatus::kAbstain, "c", "c")};
  CampaignInfo info;
  info.dataset = "d";
  info.method = "textfooler";
  info.seed = 42;
  info.samples = {"id0", "id1"};
  info.verbalizer = {{"patterns", {{"positive", {"positive"}}}}};
  auto r = build_report(info, recs, scorer_from_records(recs));
  auto j = to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  std::vector<std::string> keys;
  for (auto& [k, _] : j["metrics"].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"s_rate", "c_rate", "ppl", "t_o", "q_n", "n", "n_suc"}));
  auto back = report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Report, NullMetricsAndMarkdown) {
  std::vector<OutcomeRecord> recs{record(0, OutcomeStatus::kFailed, "a", "a")};
  CampaignInfo info;
  info.dataset = "SST-2";
  info.method = "stresstest";
  auto r = build_report(info, recs, scorer_from_records(recs));
  auto j = to_json(r);
  EXPECT_TRUE(j["metrics"]["c_rate"].is_null());
  EXPECT_TRUE(j["metrics"]["ppl"].is_null());
  auto md = emit_report(r, ReportFormat::kMarkdown);
  EXPECT_NE(md.find(kMarkdownHeader), std::string::npos);
  EXPECT_NE(md.find("| stresstest | 0.000 | \xE2\x80\x94 | \xE2\x80\x94 | \xE2\x80\x94 | \xE2\x80\x94 |"),
            std::string::npos)
      << md;
}

TEST(Report, MarkdownGroupsByDataset) {
  CampaignReport a, b, c;
  a.campaign.dataset = "SST-2";
  a.campaign.method = "textfooler";
  a.metrics.s_rate = 0.652;
  b.campaign.dataset = "AG";
  b.campaign.method = "pwws";
  c.campaign.dataset = "SST-2";
  c.campaign.method = "pwws";
  auto md = emit_markdown({a, b, c});
  auto sst = md.find("### SST-2"), ag = md.find("### AG");
  ASSERT_NE(sst, std::string::npos);
  ASSERT_NE(ag, std::string::npos);
  EXPECT_LT(md.find("| pwws", sst), ag);
  EXPECT_NE(md.find("| textfooler | 0.652 |"), std::string::npos);
}

TEST(OutcomeLog, ToleratesTruncatedLastLine) {
  auto path = std::filesystem::temp_directory_path() / "ritfis_log_test.jsonl";
  auto good = to_json(record(0, OutcomeStatus::kSuccess, "a b", "b b")).dump();
  {
    std::ofstream out(path);
    out << good << "\n" << good.substr(0, good.size() / 2);
  }
  EXPECT_EQ(read_outcome_log(path.string()).size(), 1u);
  {
    std::ofstream out(path);
    out << good.substr(0, 10) << "\n" << good << "\n";
  }
  EXPECT_THROW(read_outcome_log(path.string()), Error);
  std::filesystem::remove(path);
  EXPECT_TRUE(read_outcome_log(path.string()).empty());
}

TEST(OutcomeLog, RecordRoundTrip) {
  auto r = record(3, OutcomeStatus::kSuccess, "a b", "b b");
  auto back = record_from_json(nlohmann::json::parse(to_json(r).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(r).dump());
  EXPECT_EQ(back.outcome.edits, r.outcome.edits);
}

}  // namespace
}  // namespace ritfis
