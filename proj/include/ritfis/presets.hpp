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

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ritfis/search.hpp"

// Named strategies assembled from the shared search primitives. Each is a
// reconstruction of the published method it is named after, not a port:
//
//   textfooler  deletion-ranked greedy synonym substitution. No embedding
//               similarity or sentence encoder filter; synonyms come from the
//               configured table.
//   pwws        saliency ("unk" replacement) weighted by best-synonym gain.
//               Uses table synonyms instead of WordNet.
//   textbugger  deletion-ranked greedy over the five character edits plus the
//               top synonym. Sentence-importance ranking is not performed.
//   stresstest  fixed distraction fragments appended to the example.
//   checklist   random-string invariance fragments appended to the example.
//   random      uniform random walk over the configured operators.
//   beam        beam search over the configured operators.

namespace ritfis {

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> kNames = {"textfooler", "stresstest", "checklist",
                                                  "textbugger", "pwws",       "random",
                                                  "beam"};
  return kNames;
}

inline bool is_preset(const std::string& name) {
  for (const auto& n : preset_names())
    if (n == name) return true;
  return false;
}

// Default distraction fragments.
inline std::vector<std::string> default_stresstest_fragments() {
  return {"and true is true", "and false is not true",
          "and true is true and true is true and true is true"};
}

// Random alphanumeric strings of length 5, one per fragment.
inline std::vector<std::string> checklist_fragments(std::mt19937_64& rng, std::size_t count) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s;
    for (int j = 0; j < 5; ++j) s += kAlphabet[pick(rng)];
    out.push_back(std::move(s));
  }
  return out;
}

struct StrategyConfig {
  std::string preset = "textfooler";
  std::shared_ptr<const SynonymTable> synonyms;
  std::size_t top_k = 50;
  // Overrides the preset fragment inventory when non-empty.
  std::vector<std::string> fragments;
  Placement placement = Placement::kTail;
  std::size_t checklist_count = 30;
  // Operator names for random and beam; defaults to synonym (when a table
  // is present) plus the five character edits.
  std::vector<std::string> operators;
  std::size_t beam_width = 4;
};

inline TransformationList build_operators(const StrategyConfig& cfg) {
  std::vector<std::string> names = cfg.operators;
  if (names.empty()) {
    if (cfg.synonyms) names.push_back("synonym");
    for (auto k : kAllCharEdits) names.push_back(to_string(k));
  }
  TransformationList ops;
  for (const auto& n : names) ops.push_back(make_transformation(n, cfg.synonyms, cfg.top_k));
  return ops;
}

inline std::shared_ptr<const SynonymTable> require_synonyms(const StrategyConfig& cfg) {
  if (!cfg.synonyms) throw ConfigError("preset '" + cfg.preset + "' needs a synonym table");
  return cfg.synonyms;
}

inline SearchOutcome run_strategy(const StrategyConfig& cfg, SearchContext& ctx) {
  const auto& p = cfg.preset;
  if (p == "textfooler") return greedy_wir_search(ctx, require_synonyms(cfg), cfg.top_k);
  if (p == "pwws") return saliency_weighted_search(ctx, require_synonyms(cfg), cfg.top_k);
  if (p == "textbugger") return char_bug_search(ctx, cfg.synonyms);
  if (p == "stresstest")
    return fixed_transformation_search(
        ctx, cfg.fragments.empty() ? default_stresstest_fragments() : cfg.fragments, cfg.placement);
  if (p == "checklist") {
    auto frags = cfg.fragments.empty() ? checklist_fragments(ctx.rng(), cfg.checklist_count)
                                       : cfg.fragments;
    return fixed_transformation_search(ctx, frags, cfg.placement);
  }
  if (p == "random") return random_search(ctx, build_operators(cfg));
  if (p == "beam") return beam_search(ctx, build_operators(cfg), cfg.beam_width);
  throw ConfigError("unknown preset '" + p + "'");
}

}  // namespace ritfis
