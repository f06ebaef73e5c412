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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "ritfis/goal.hpp"
#include "ritfis/text.hpp"
#include "ritfis/threat_model.hpp"
#include "ritfis/transform.hpp"

namespace ritfis {

enum class OutcomeStatus { kSuccess, kFailed, kAbstain, kBudgetExhausted, kSkipped };

inline const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::kSuccess: return "SUCCESS";
    case OutcomeStatus::kFailed: return "FAILED";
    case OutcomeStatus::kAbstain: return "ABSTAIN";
    case OutcomeStatus::kBudgetExhausted: return "BUDGET_EXHAUSTED";
    case OutcomeStatus::kSkipped: return "SKIPPED";
  }
  return "?";
}

inline OutcomeStatus outcome_status_from_string(const std::string& s) {
  for (auto st : {OutcomeStatus::kSuccess, OutcomeStatus::kFailed, OutcomeStatus::kAbstain,
                  OutcomeStatus::kBudgetExhausted, OutcomeStatus::kSkipped})
    if (s == to_string(st)) return st;
  throw Error("unknown outcome status: " + s);
}

struct SearchOutcome {
  std::string sample_id;
  OutcomeStatus status = OutcomeStatus::kFailed;
  // Full perturbed input, and the example part of it.
  std::string final_text;
  std::string final_example;
  std::string final_label;
  std::vector<Edit> edits;
  std::size_t queries_used = 0;
  double elapsed_seconds = 0.0;
  std::vector<double> score_trace;
  // Changed words and word count of the original perturbable region.
  std::size_t word_diff = 0;
  std::size_t region_words = 0;
};

struct WordRanking {
  std::vector<std::pair<std::size_t, double>> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> out;
    for (const auto& [p, _] : entries) out.push_back(p);
    return out;
  }
};

// What is being searched: one example rendered with its prompt.
struct SearchProblem {
  std::string sample_id;
  ModelInput input;
  std::string truth;
  // Extends the perturbable region from the example to the whole input.
  bool perturb_prompt = false;
};

struct Evaluation {
  GoalResult goal;
  std::string label;
};

// A point in the search space: edits against the original input plus the
// goal evaluation of the text they produce.
struct SearchState {
  std::vector<Edit> edits;
  double score = 0.0;
  GoalStatus status = GoalStatus::kFailed;
  std::string label;
  std::string text;
};

namespace detail {

// Thrown when the next model query would exceed the budget.
struct BudgetStop {};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace detail

// Per-example search machinery: query accounting, budget enforcement,
// rendering of edit lists, constraint checks and candidate generation.
// One context serves exactly one sequential search.
class SearchContext {
 public:
  using Clock = std::chrono::steady_clock;

  SearchContext(const ThreatModel& model, QueryLedger& ledger, SearchProblem problem,
                ConstraintSet constraints, Budget budget, std::uint64_t seed,
                RetryPolicy retry = {}, ResponseCache* shared_cache = nullptr)
      : model_(model),
        ledger_(ledger),
        problem_(std::move(problem)),
        constraints_(std::move(constraints)),
        budget_(budget),
        retry_(std::move(retry)),
        cache_(shared_cache ? shared_cache : &local_cache_),
        rng_(seed),
        start_(Clock::now()) {
    auto tokens = tokenize_input(problem_.input);
    original_ = std::move(tokens.text);
    example_begin_ = tokens.example_begin;
    region_begin_ = problem_.perturb_prompt ? 0 : example_begin_;
  }

  const TokenizedText& original() const { return original_; }
  const SearchProblem& problem() const { return problem_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const Budget& budget() const { return budget_; }
  std::size_t example_begin() const { return example_begin_; }
  std::size_t region_begin() const { return region_begin_; }
  std::mt19937_64& rng() { return rng_; }
  const std::string& truth() const { return problem_.truth; }

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  std::size_t queries_used() const { return ledger_.queries(problem_.sample_id); }

  // Original word positions of the perturbable region.
  std::vector<std::size_t> region_words() const {
    std::vector<std::size_t> out;
    for (std::size_t i = region_begin_; i < original_.size(); ++i)
      if (original_[i].kind == TokenKind::kWord) out.push_back(i);
    return out;
  }

  // Region word positions still editable under `edits`: not deleted, and not
  // yet edited when re-edits are forbidden.
  std::vector<std::size_t> open_positions(const std::vector<Edit>& edits) const {
    std::unordered_set<std::size_t> closed;
    for (const auto& e : edits) {
      if (e.kind == EditKind::kDelete || (constraints_.forbid_re_edit && e.kind != EditKind::kAppend))
        closed.insert(e.position);
    }
    std::vector<std::size_t> out;
    for (auto p : region_words())
      if (!closed.count(p)) out.push_back(p);
    return out;
  }

  ModelInput render(const Replay& r) const {
    std::size_t first_example = 0;
    for (std::size_t i = 0; i < r.origin.size(); ++i)
      if (r.origin[i] != Replay::kAppended && r.origin[i] < example_begin_) first_example = i + 1;
    ModelInput in;
    in.full_text = r.text.source;
    std::size_t ex_start = first_example < r.text.size() ? r.text[first_example].start_byte
                                                         : in.full_text.size();
    std::size_t prompt_end =
        first_example > 0
            ? r.text[first_example - 1].start_byte + r.text[first_example - 1].surface.size()
            : 0;
    in.prompt_span = {0, prompt_end};
    in.example_span = {ex_start, in.full_text.size()};
    return in;
  }

  ModelInput render(const std::vector<Edit>& edits) const {
    if (edits.empty()) return problem_.input;
    return render(replay_edits(original_, edits));
  }

  // Example part of the text produced by `edits`.
  std::string example_text(const std::vector<Edit>& edits) const {
    auto in = render(edits);
    return std::string(in.example());
  }

  std::vector<Violation> violations(const std::vector<Edit>& edits) const {
    Candidate c;
    c.edits = edits;
    return check_constraints(original_, c, constraints_, region_begin_);
  }

  bool admissible(const std::vector<Edit>& edits) const { return violations(edits).empty(); }

  // Goal evaluation of the text produced by `edits`. Cache hits are free;
  // a miss that would exceed the budget throws BudgetStop. Query or parse
  // failures yield nullopt.
  std::optional<Evaluation> evaluate(const std::vector<Edit>& edits) {
    auto input = render(edits);
    if (auto hit = cache_->lookup(input.full_text, model_.labels()))
      return Evaluation{evaluate_goal(*hit, problem_.truth), hit->top_label};
    if (budget_exceeded(budget_, queries_used(), elapsed())) throw detail::BudgetStop{};
    try {
      auto p = query(model_, input, ledger_, cache_, problem_.sample_id, retry_);
      return Evaluation{evaluate_goal(p, problem_.truth), p.top_label};
    } catch (const QueryFailed&) {
      return std::nullopt;
    } catch (const LabelParseFailed&) {
      return std::nullopt;
    }
  }

  std::optional<SearchState> evaluate_state(std::vector<Edit> edits) {
    auto ev = evaluate(edits);
    if (!ev) return std::nullopt;
    SearchState s;
    s.text = render(edits).full_text;
    s.edits = std::move(edits);
    s.score = ev->goal.score;
    s.status = ev->goal.status;
    s.label = ev->label;
    return s;
  }

  // Admissible edit lists reachable from `state` by one application of `op`
  // at original position `position` (ignored by text-level operators).
  std::vector<std::vector<Edit>> neighbors(const std::vector<Edit>& state, std::size_t position,
                                           const Transformation& op) {
    auto r = replay_edits(original_, state);
    std::vector<std::vector<Edit>> out;
    std::vector<Candidate> cands;
    std::size_t offset = 0;
    if (op.text_level()) {
      // Text-level operators see only the perturbable region.
      std::size_t first = 0;
      for (std::size_t i = 0; i < r.origin.size(); ++i)
        if (r.origin[i] != Replay::kAppended && r.origin[i] < region_begin_) first = i + 1;
      std::vector<Token> toks(r.text.tokens.begin() + static_cast<std::ptrdiff_t>(first),
                              r.text.tokens.end());
      std::vector<std::string> gaps(r.text.gaps.begin() + static_cast<std::ptrdiff_t>(first),
                                    r.text.gaps.end());
      if (first > 0) gaps.front().clear();
      auto region = TokenizedText::assemble(std::move(toks), std::move(gaps));
      cands = op.generate(region, 0, rng_);
      offset = first;
    } else {
      auto idx = r.current_index(position);
      if (!idx) return out;
      cands = op.generate(r.text, *idx, rng_);
    }
    for (auto& c : cands) {
      std::vector<Edit> edits = state;
      for (auto e : c.edits) {
        e.position = to_original(r, e.position + offset, e.kind);
        edits.push_back(std::move(e));
      }
      sort_edits(edits);
      if (admissible(edits)) out.push_back(std::move(edits));
    }
    return out;
  }

  SearchOutcome finish(OutcomeStatus status, const SearchState& state,
                       std::vector<double> trace) const {
    SearchOutcome o;
    o.sample_id = problem_.sample_id;
    o.status = status;
    o.edits = state.edits;
    auto r = replay_edits(original_, state.edits);
    auto in = render(state.edits);
    o.final_text = in.full_text;
    o.final_example = std::string(in.example());
    o.final_label = state.label;
    o.queries_used = queries_used();
    o.elapsed_seconds = elapsed();
    o.score_trace = std::move(trace);
    o.word_diff = word_diff(original_, r.text, state.edits);
    o.region_words = original_.word_count(region_begin_);
    ledger_.set_elapsed(problem_.sample_id, o.elapsed_seconds);
    return o;
  }

 private:
  std::size_t to_original(const Replay& r, std::size_t current, EditKind kind) const {
    if (kind == EditKind::kAppend) {
      for (std::size_t i = current; i < r.origin.size(); ++i)
        if (r.origin[i] != Replay::kAppended) return r.origin[i];
      return original_.size();
    }
    if (current >= r.origin.size() || r.origin[current] == Replay::kAppended)
      throw Error("operator edited a token without an original position");
    return r.origin[current];
  }

  const ThreatModel& model_;
  QueryLedger& ledger_;
  SearchProblem problem_;
  ConstraintSet constraints_;
  Budget budget_;
  RetryPolicy retry_;
  ResponseCache local_cache_;
  ResponseCache* cache_;
  std::mt19937_64 rng_;
  Clock::time_point start_;
  TokenizedText original_;
  std::size_t example_begin_ = 0;
  std::size_t region_begin_ = 0;
};

namespace detail {

// Runs `body` with the baseline already evaluated. Handles the outcomes every
// strategy shares: abstain on the baseline, an already-misclassified input,
// and budget exhaustion.
template <typename Body>
SearchOutcome run_search(SearchContext& ctx, Body&& body) {
  SearchState current;
  std::vector<double> trace;
  try {
    auto base = ctx.evaluate_state({});
    if (!base) return ctx.finish(OutcomeStatus::kAbstain, current, trace);
    current = *base;
    trace.push_back(current.score);
    if (current.status == GoalStatus::kSuccess)
      return ctx.finish(OutcomeStatus::kSkipped, current, trace);
    auto status = body(current, trace);
    return ctx.finish(status, current, trace);
  } catch (const BudgetStop&) {
    return ctx.finish(OutcomeStatus::kBudgetExhausted, current, trace);
  }
}

inline void accept(SearchState& current, std::vector<double>& trace, SearchState next) {
  current = std::move(next);
  trace.push_back(current.score);
}

// The best of `cands` by score (earliest on ties), except that a successful
// candidate beating the current score is preferred over a failing one.
inline std::optional<SearchState> pick_best(const std::vector<SearchState>& cands,
                                            double current_score) {
  const SearchState* best = nullptr;
  const SearchState* best_success = nullptr;
  for (const auto& c : cands) {
    if (!best || c.score > best->score) best = &c;
    if (c.status == GoalStatus::kSuccess && (!best_success || c.score > best_success->score))
      best_success = &c;
  }
  if (best && best->status != GoalStatus::kSuccess && best_success &&
      best_success->score > current_score)
    return *best_success;
  if (best) return *best;
  return std::nullopt;
}

inline WordRanking rank_with(SearchContext& ctx, double baseline,
                             const std::function<std::optional<Edit>(std::size_t)>& make_edit) {
  auto positions = ctx.region_words();
  if (positions.empty()) throw EmptyRegion();
  WordRanking ranking;
  for (auto p : positions) {
    const auto& surface = ctx.original()[p].surface;
    if (ctx.constraints().is_stop_word(surface)) {
      ranking.entries.emplace_back(p, kNegInf);
      continue;
    }
    auto edit = make_edit(p);
    std::optional<Evaluation> ev;
    if (edit) ev = ctx.evaluate({*edit});
    else ev = ctx.evaluate({});
    ranking.entries.emplace_back(p, ev ? ev->goal.score - baseline : kNegInf);
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranking;
}

}  // namespace detail

// importance(i) = score with word i deleted - baseline score. Stop words are
// not queried and rank last with importance -inf.
inline WordRanking rank_by_deletion(SearchContext& ctx, double baseline_score) {
  return detail::rank_with(ctx, baseline_score, [&](std::size_t p) -> std::optional<Edit> {
    return Edit{p, EditKind::kDelete, ctx.original()[p].surface, ""};
  });
}

// importance(i) = score with word i replaced by "unk" - baseline score.
inline WordRanking rank_by_unk_saliency(SearchContext& ctx, double baseline_score) {
  return detail::rank_with(ctx, baseline_score, [&](std::size_t p) -> std::optional<Edit> {
    const auto& s = ctx.original()[p].surface;
    if (s == "unk") return std::nullopt;
    return Edit{p, EditKind::kSubstitute, s, "unk"};
  });
}

namespace detail {

// Evaluates every neighbour and returns those that answered.
inline std::vector<SearchState> evaluate_all(SearchContext& ctx,
                                             std::vector<std::vector<Edit>> neighbours) {
  std::vector<SearchState> out;
  for (auto& n : neighbours)
    if (auto s = ctx.evaluate_state(std::move(n))) out.push_back(std::move(*s));
  return out;
}

// Greedy traversal of `ranking`: at each position take the best candidate
// produced by `ops` if it improves the current score.
inline OutcomeStatus greedy_over_ranking(SearchContext& ctx, const WordRanking& ranking,
                                         const TransformationList& ops, SearchState& current,
                                         std::vector<double>& trace) {
  for (const auto& [pos, importance] : ranking.entries) {
    if (importance == kNegInf) continue;
    std::vector<std::vector<Edit>> neighbours;
    for (const auto& op : ops)
      for (auto& n : ctx.neighbors(current.edits, pos, *op)) neighbours.push_back(std::move(n));
    auto evaluated = evaluate_all(ctx, std::move(neighbours));
    auto best = pick_best(evaluated, current.score);
    if (best && (best->score > current.score ||
                 (best->status == GoalStatus::kSuccess && current.status != GoalStatus::kSuccess))) {
      accept(current, trace, std::move(*best));
      if (current.status == GoalStatus::kSuccess) return OutcomeStatus::kSuccess;
    }
  }
  return OutcomeStatus::kFailed;
}

}  // namespace detail

// Word-importance-ranked greedy synonym substitution.
inline SearchOutcome greedy_wir_search(SearchContext& ctx, std::shared_ptr<const SynonymTable> table,
                                       std::size_t top_k = 50) {
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    if (ctx.region_words().empty()) return OutcomeStatus::kFailed;
    auto ranking = rank_by_deletion(ctx, current.score);
    TransformationList ops{std::make_shared<SynonymSwap>(table, top_k)};
    return detail::greedy_over_ranking(ctx, ranking, ops, current, trace);
  });
}

// Saliency-weighted synonym substitution: positions are visited in order of
// best-synonym gain times softmax(saliency).
inline SearchOutcome saliency_weighted_search(SearchContext& ctx,
                                              std::shared_ptr<const SynonymTable> table,
                                              std::size_t top_k = 50) {
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    if (ctx.region_words().empty()) return OutcomeStatus::kFailed;
    const double baseline = current.score;
    auto saliency = rank_by_unk_saliency(ctx, baseline);
    std::sort(saliency.entries.begin(), saliency.entries.end());  // by position

    double mx = detail::kNegInf;
    for (const auto& [_, s] : saliency.entries) mx = std::max(mx, s);
    double z = 0;
    std::vector<double> soft(saliency.size(), 0.0);
    for (std::size_t i = 0; i < saliency.size(); ++i) {
      if (saliency.entries[i].second == detail::kNegInf) continue;
      soft[i] = std::exp(saliency.entries[i].second - mx);
      z += soft[i];
    }

    SynonymSwap op(table, top_k);
    struct Choice {
      std::size_t position;
      double priority;
      SearchState best;
    };
    std::vector<Choice> choices;
    for (std::size_t i = 0; i < saliency.size(); ++i) {
      auto [pos, sal] = saliency.entries[i];
      if (sal == detail::kNegInf) continue;
      auto evaluated = detail::evaluate_all(ctx, ctx.neighbors({}, pos, op));
      auto best = detail::pick_best(evaluated, baseline);
      if (!best) continue;
      double gain = best->score - baseline;
      choices.push_back({pos, gain * (soft[i] / z), std::move(*best)});
    }
    std::stable_sort(choices.begin(), choices.end(),
                     [](const Choice& a, const Choice& b) { return a.priority > b.priority; });

    for (const auto& ch : choices) {
      // Re-apply this position's best substitution on top of the current state.
      std::vector<Edit> edits = current.edits;
      for (const auto& e : ch.best.edits) edits.push_back(e);
      sort_edits(edits);
      if (!ctx.admissible(edits)) continue;
      auto next = ctx.evaluate_state(std::move(edits));
      if (!next) continue;
      if (next->score > current.score || next->status == GoalStatus::kSuccess) {
        detail::accept(current, trace, std::move(*next));
        if (current.status == GoalStatus::kSuccess) return OutcomeStatus::kSuccess;
      }
    }
    return OutcomeStatus::kFailed;
  });
}

// Deletion-ranked traversal trying all five character edits plus the top
// synonym at every position.
inline SearchOutcome char_bug_search(SearchContext& ctx,
                                     std::shared_ptr<const SynonymTable> table = nullptr) {
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    if (ctx.region_words().empty()) return OutcomeStatus::kFailed;
    auto ranking = rank_by_deletion(ctx, current.score);
    TransformationList ops;
    for (auto k : kAllCharEdits) ops.push_back(std::make_shared<CharEdit>(k));
    if (table) ops.push_back(std::make_shared<SynonymSwap>(table, 1));
    return detail::greedy_over_ranking(ctx, ranking, ops, current, trace);
  });
}

// Tries each fragment once, attached to the original input, and stops at
// the first success. Uses at most |fragments| + 1 queries.
inline SearchOutcome fixed_transformation_search(SearchContext& ctx,
                                                 const std::vector<std::string>& fragments,
                                                 Placement where) {
  if (fragments.empty()) throw Error("fixed transformation search needs at least one fragment");
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    std::size_t position = ctx.original().size();
    if (where == Placement::kHead)
      position = std::min(ctx.region_begin(), ctx.original().size());
    for (const auto& f : fragments) {
      std::vector<Edit> edits = current.edits;
      edits.push_back({position, EditKind::kAppend, "", trim(f)});
      sort_edits(edits);
      if (!ctx.admissible(edits)) continue;
      auto next = ctx.evaluate_state(std::move(edits));
      if (next && next->status == GoalStatus::kSuccess) {
        detail::accept(current, trace, std::move(*next));
        return OutcomeStatus::kSuccess;
      }
    }
    return OutcomeStatus::kFailed;
  });
}

// Uniform random walk over (operator, position, candidate) that keeps
// improving steps. Gives up after `max_attempts` draws.
inline SearchOutcome random_search(SearchContext& ctx, const TransformationList& ops,
                                   std::size_t max_attempts = 0) {
  if (ops.empty()) throw Error("random search needs at least one operator");
  if (max_attempts == 0) max_attempts = 20 * ctx.budget().max_queries + 100;
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    auto& rng = ctx.rng();
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
      std::uniform_int_distribution<std::size_t> pick_op(0, ops.size() - 1);
      const auto& op = *ops[pick_op(rng)];
      std::size_t pos = 0;
      if (!op.text_level()) {
        auto open = ctx.open_positions(current.edits);
        if (open.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick_pos(0, open.size() - 1);
        pos = open[pick_pos(rng)];
      }
      auto neighbours = ctx.neighbors(current.edits, pos, op);
      if (neighbours.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick_cand(0, neighbours.size() - 1);
      auto next = ctx.evaluate_state(std::move(neighbours[pick_cand(rng)]));
      if (next && next->score > current.score) {
        detail::accept(current, trace, std::move(*next));
        if (current.status == GoalStatus::kSuccess) return OutcomeStatus::kSuccess;
      }
    }
    return OutcomeStatus::kFailed;
  });
}

namespace detail {

// Frontier order: higher score, then fewer edits, then lexicographic text.
inline bool frontier_less(const SearchState& a, const SearchState& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.edits.size() != b.edits.size()) return a.edits.size() < b.edits.size();
  return a.text < b.text;
}

// Every evaluated single-step successor of `state`, in generation order:
// positions ascending, then operators in list order, then candidate order.
inline std::vector<SearchState> expand(SearchContext& ctx, const SearchState& state,
                                       const TransformationList& ops) {
  std::vector<std::vector<Edit>> neighbours;
  for (auto pos : ctx.open_positions(state.edits)) {
    for (const auto& op : ops) {
      if (op->text_level()) continue;
      for (auto& n : ctx.neighbors(state.edits, pos, *op)) neighbours.push_back(std::move(n));
    }
  }
  for (const auto& op : ops) {
    if (!op->text_level()) continue;
    for (auto& n : ctx.neighbors(state.edits, 0, *op)) neighbours.push_back(std::move(n));
  }
  return evaluate_all(ctx, std::move(neighbours));
}

inline void sort_frontier(std::vector<SearchState>& states) {
  std::stable_sort(states.begin(), states.end(), frontier_less);
  std::unordered_set<std::string> seen;
  std::vector<SearchState> unique;
  for (auto& s : states)
    if (seen.insert(s.text).second) unique.push_back(std::move(s));
  states = std::move(unique);
}

}  // namespace detail

// Steepest-ascent hill climbing: evaluate every single-step successor and move
// to the best one while it improves the score.
inline SearchOutcome hill_climb_search(SearchContext& ctx, const TransformationList& ops,
                                       std::size_t max_depth = std::numeric_limits<std::size_t>::max()) {
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    for (std::size_t depth = 0; depth < max_depth; ++depth) {
      auto children = detail::expand(ctx, current, ops);
      if (children.empty()) break;
      const SearchState* best = &children.front();
      const SearchState* best_success = nullptr;
      for (const auto& c : children) {
        if (detail::frontier_less(c, *best)) best = &c;
        if (c.status == GoalStatus::kSuccess &&
            (!best_success || detail::frontier_less(c, *best_success)))
          best_success = &c;
      }
      if (best_success) {
        detail::accept(current, trace, *best_success);
        return OutcomeStatus::kSuccess;
      }
      if (!(best->score > current.score)) break;
      detail::accept(current, trace, *best);
    }
    return OutcomeStatus::kFailed;
  });
}

// Beam search over edit sequences. Width 1 is exactly hill_climb_search.
inline SearchOutcome beam_search(SearchContext& ctx, const TransformationList& ops,
                                 std::size_t beam_width,
                                 std::size_t max_depth = std::numeric_limits<std::size_t>::max()) {
  if (beam_width == 0) throw Error("beam width must be at least 1");
  return detail::run_search(ctx, [&](SearchState& current, std::vector<double>& trace) {
    std::vector<SearchState> beam{current};
    for (std::size_t depth = 0; depth < max_depth; ++depth) {
      std::vector<SearchState> children;
      for (const auto& s : beam)
        for (auto& c : detail::expand(ctx, s, ops)) children.push_back(std::move(c));
      if (children.empty()) break;
      detail::sort_frontier(children);
      for (const auto& c : children) {
        if (c.status == GoalStatus::kSuccess) {
          detail::accept(current, trace, c);
          return OutcomeStatus::kSuccess;
        }
      }
      if (!(children.front().score > current.score)) break;
      detail::accept(current, trace, children.front());
      if (children.size() > beam_width) children.resize(beam_width);
      beam = std::move(children);
    }
    return OutcomeStatus::kFailed;
  });
}

}  // namespace ritfis
