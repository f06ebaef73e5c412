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

#include "gtest/gtest.h"
#include "ritfis/goal.hpp"

namespace ritfis {
namespace {

const LabelSet kBinary({"positive", "negative"});
const LabelSet kTernary({"positive", "neutral", "negative"});

TEST(Goal, ScoreIsOneMinusTruthProbability) {
  auto p = Prediction::make(kBinary, {0.3, 0.7});
  auto g = evaluate_goal(p, "positive");
  EXPECT_EQ(g.status, GoalStatus::kSuccess);
  EXPECT_DOUBLE_EQ(g.score, 0.7);
  auto h = evaluate_goal(p, "negative");
  EXPECT_EQ(h.status, GoalStatus::kFailed);
  EXPECT_NEAR(h.score, 0.3, 1e-15);
}

TEST(Goal, AnyOtherLabelSucceeds) {
  auto p = Prediction::make(kTernary, {0.2, 0.5, 0.3});
  EXPECT_EQ(evaluate_goal(p, "negative").status, GoalStatus::kSuccess);
  EXPECT_EQ(evaluate_goal(p, "positive").status, GoalStatus::kSuccess);
  EXPECT_EQ(evaluate_goal(p, "neutral").status, GoalStatus::kFailed);
}

TEST(Goal, Abstain) {
  EXPECT_EQ(abstain().status, GoalStatus::kAbstain);
}

TEST(Budget, Defaults) {
  Budget b;
  EXPECT_EQ(b.max_queries, 500u);
  EXPECT_DOUBLE_EQ(b.max_seconds, 3600.0);
}

TEST(Budget, BoundaryIsInclusive) {
  Budget b{3, 10.0};
  EXPECT_FALSE(budget_exceeded(b, 2, 9.99));
  EXPECT_TRUE(budget_exceeded(b, 3, 0.0));
  EXPECT_TRUE(budget_exceeded(b, 0, 10.0));
}

TEST(Budget, ReadsLedger) {
  Budget b{2, 100.0};
  QueryLedger ledger;
  ledger.record_query("a");
  EXPECT_FALSE(budget_exceeded(b, ledger, "a"));
  ledger.record_query("a");
  EXPECT_TRUE(budget_exceeded(b, ledger, "a"));
  EXPECT_FALSE(budget_exceeded(b, ledger, "b"));
  ledger.set_elapsed("b", 100.0);
  EXPECT_TRUE(budget_exceeded(b, ledger, "b"));
}

}  // namespace
}  // namespace ritfis
