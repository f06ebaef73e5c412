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

#pragma once

#include <string>

#include "ritfis/threat_model.hpp"

namespace ritfis {

enum class GoalStatus { kSuccess, kFailed, kAbstain };

struct GoalResult {
  GoalStatus status = GoalStatus::kFailed;
  // 1 - p(truth): larger means more pressure towards misclassification.
  double score = 0.0;
};

// Untargeted goal: any label other than the truth counts as success.
inline GoalResult evaluate_goal(const Prediction& pred, const std::string& truth) {
  GoalResult r;
  r.score = 1.0 - pred.score(truth);
  r.status = pred.top_label != truth ? GoalStatus::kSuccess : GoalStatus::kFailed;
  return r;
}

inline GoalResult abstain() { return {GoalStatus::kAbstain, 0.0}; }

struct Budget {
  std::size_t max_queries = 500;
  double max_seconds = 3600.0;
};

inline bool budget_exceeded(const Budget& b, std::size_t queries, double elapsed_seconds) {
  return queries >= b.max_queries || elapsed_seconds >= b.max_seconds;
}

inline bool budget_exceeded(const Budget& b, const QueryLedger& ledger,
                            const std::string& sample_id) {
  return budget_exceeded(b, ledger.queries(sample_id), ledger.elapsed(sample_id));
}

}  // namespace ritfis
