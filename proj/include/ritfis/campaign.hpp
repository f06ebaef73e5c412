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

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "ritfis/config.hpp"
#include "ritfis/metrics.hpp"
#include "ritfis/presets.hpp"

namespace ritfis {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// RNG seed of one example; independent of scheduling.
inline std::uint64_t example_seed(std::uint64_t campaign_seed, const std::string& sample_id) {
  return splitmix64(campaign_seed ^ splitmix64(fnv1a64(sample_id)));
}

// Seeded reservoir sample of `k` indices out of `n`, returned ascending.
inline std::vector<std::size_t> reservoir_sample(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> out;
  if (k >= n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  std::mt19937_64 rng(splitmix64(seed));
  for (std::size_t i = 0; i < n; ++i) {
    if (i < k) {
      out.push_back(i);
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick(0, i);
    auto j = pick(rng);
    if (j < k) out[j] = i;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Everything a campaign needs, loaded from the files a config references.
struct CampaignResources {
  Dataset dataset;
  std::vector<std::size_t> selection;
  std::unique_ptr<ThreatModel> model;
  ConstraintSet constraints;
  StrategyConfig strategy;
  RetryPolicy retry;
};

inline std::unique_ptr<ThreatModel> build_model(const CampaignConfig& cfg) {
  if (cfg.model_kind == "surrogate") {
    auto lex = SurrogateLexicon::load(cfg.lexicon_path.string());
    lex.validate(cfg.label_set);
    return std::make_unique<SurrogateModel>(std::move(lex), cfg.label_set);
  }
  return std::make_unique<HttpChatModel>(cfg.http, cfg.label_set, cfg.verbalizer);
}

inline ConstraintSet build_constraints(const CampaignConfig& cfg) {
  ConstraintSet cs;
  if (cfg.stop_words_path) cs.stop_words = load_word_list(cfg.stop_words_path->string());
  if (cfg.blacklist_path) cs.blacklist = load_word_list(cfg.blacklist_path->string());
  if (cfg.pos_lexicon_path) cs.pos_lexicon = load_pos_lexicon(cfg.pos_lexicon_path->string());
  cs.max_change_rate = cfg.max_change_rate;
  cs.max_edits = cfg.max_edits;
  cs.forbid_re_edit = cfg.forbid_re_edit;
  return cs;
}

inline StrategyConfig build_strategy(const CampaignConfig& cfg) {
  StrategyConfig s;
  s.preset = cfg.preset;
  if (cfg.synonyms_path)
    s.synonyms = std::make_shared<const SynonymTable>(SynonymTable::load(cfg.synonyms_path->string()));
  s.top_k = cfg.top_k;
  s.fragments = cfg.fragments;
  s.placement = cfg.placement;
  s.checklist_count = cfg.checklist_count;
  s.operators = cfg.operators;
  s.beam_width = cfg.beam_width;
  return s;
}

inline CampaignResources load_resources(const CampaignConfig& cfg) {
  CampaignResources r;
  r.dataset = load_dataset(cfg.dataset_path.string(), cfg.dataset_format, cfg.label_set,
                           cfg.dataset_name);
  r.selection = reservoir_sample(r.dataset.size(), cfg.sample_size.value_or(r.dataset.size()),
                                 cfg.seed);
  r.model = build_model(cfg);
  r.constraints = build_constraints(cfg);
  r.strategy = build_strategy(cfg);
  r.retry.max_attempts = cfg.retry_attempts;
  r.retry.base_delay = std::chrono::milliseconds(cfg.retry_base_delay_ms);
  return r;
}

inline NgramScorer load_scorer(const std::optional<std::filesystem::path>& corpus, double alpha,
                               const std::vector<OutcomeRecord>& records) {
  if (!corpus) return scorer_from_records(records, alpha);
  std::ifstream in(*corpus);
  if (!in) throw ConfigError("cannot open PPL corpus: " + corpus->string());
  NgramScorer s(alpha);
  for (std::string line; std::getline(in, line);)
    if (!trim(line).empty()) s.train_text(line);
  return s;
}

// Campaign metadata stored next to the outcome log so reports can be
// rebuilt from the log alone.
inline nlohmann::ordered_json campaign_meta(const CampaignInfo& info, const CampaignConfig& cfg) {
  nlohmann::ordered_json j;
  j["dataset"] = info.dataset;
  j["method"] = info.method;
  j["prompt"] = info.prompt;
  j["model"] = info.model;
  j["seed"] = info.seed;
  j["config_hash"] = info.config_hash;
  j["verbalizer"] = info.verbalizer;
  j["samples"] = info.samples;
  j["ppl_alpha"] = cfg.ppl_alpha;
  j["ppl_corpus"] = cfg.ppl_corpus ? nlohmann::ordered_json(std::filesystem::absolute(*cfg.ppl_corpus).string())
                                   : nlohmann::ordered_json();
  return j;
}

inline CampaignReport report_from_log(const std::filesystem::path& log_path,
                                      const nlohmann::json& meta) {
  auto records = read_outcome_log(log_path.string());
  CampaignInfo info;
  info.dataset = meta.value("dataset", "");
  info.method = meta.value("method", "");
  info.prompt = meta.value("prompt", "");
  info.model = meta.value("model", "");
  info.seed = meta.value("seed", std::uint64_t{0});
  info.config_hash = meta.value("config_hash", "");
  if (meta.contains("verbalizer"))
    info.verbalizer = nlohmann::ordered_json::parse(meta["verbalizer"].dump());
  if (meta.contains("samples")) info.samples = meta["samples"].get<std::vector<std::string>>();
  std::optional<std::filesystem::path> corpus;
  if (meta.contains("ppl_corpus") && meta["ppl_corpus"].is_string())
    corpus = meta["ppl_corpus"].get<std::string>();
  auto scorer = load_scorer(corpus, meta.value("ppl_alpha", 1.0), records);
  return build_report(std::move(info), std::move(records), scorer);
}

struct RunOptions {
  // Stop taking new examples after this many have been logged in this run;
  // used to simulate an interrupted campaign.
  std::size_t stop_after = std::numeric_limits<std::size_t>::max();
  // Shared response cache; defaults to a per-example in-memory cache.
  std::shared_ptr<ResponseCache> shared_cache;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

struct CampaignPaths {
  std::filesystem::path log, meta, report_json, report_md;

  explicit CampaignPaths(const std::filesystem::path& dir)
      : log(dir / "outcomes.jsonl"),
        meta(dir / "campaign.json"),
        report_json(dir / "report.json"),
        report_md(dir / "report.md") {}
};

// Runs (or resumes) a campaign. Outcomes already in the log are kept and their
// samples skipped; the final report is always rebuilt from the log.
inline CampaignReport run_campaign(const CampaignConfig& cfg, const RunOptions& opts = {}) {
  auto res = load_resources(cfg);
  res.model->check_reachable();

  std::filesystem::create_directories(cfg.output_dir);
  CampaignPaths paths(cfg.output_dir);

  CampaignInfo info;
  info.dataset = res.dataset.name;
  info.method = cfg.preset;
  info.prompt = cfg.prompt.prefix;
  info.model = res.model->describe();
  info.seed = cfg.seed;
  info.config_hash = config_fingerprint(cfg);
  info.verbalizer = cfg.verbalizer.to_json();
  for (auto i : res.selection) info.samples.push_back(res.dataset.samples[i].id);
  auto meta = campaign_meta(info, cfg);

  if (std::filesystem::exists(paths.meta)) {
    std::ifstream in(paths.meta);
    auto old = nlohmann::json::parse(in, nullptr, false);
    if (!old.is_discarded() && old.value("config_hash", "") != info.config_hash)
      throw Error("output directory " + cfg.output_dir.string() +
                  " holds a campaign with a different configuration");
  }
  detail::write_file(paths.meta, meta.dump(2) + "\n");

  // Keep only well-formed records of this campaign's samples, then append.
  std::set<std::string> wanted(info.samples.begin(), info.samples.end());
  std::vector<OutcomeRecord> kept;
  std::set<std::string> done;
  for (auto& r : read_outcome_log(paths.log.string()))
    if (wanted.count(r.outcome.sample_id) && done.insert(r.outcome.sample_id).second)
      kept.push_back(std::move(r));
  {
    std::string content;
    for (const auto& r : kept) content += to_json(r).dump() + "\n";
    detail::write_file(paths.log, content);
  }

  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < res.selection.size(); ++k)
    if (!done.count(res.dataset.samples[res.selection[k]].id)) pending.push_back(k);

  auto shared_cache = opts.shared_cache;
  if (!shared_cache && cfg.cache_dir) shared_cache = std::make_shared<ResponseCache>(*cfg.cache_dir);

  QueryLedger ledger;
  std::ofstream log(paths.log, std::ios::app | std::ios::binary);
  std::mutex log_mu;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> written{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    while (!abort) {
      auto slot = next.fetch_add(1);
      if (slot >= pending.size() || slot >= opts.stop_after) return;
      const auto k = pending[slot];
      const auto& sample = res.dataset.samples[res.selection[k]];
      try {
        SearchProblem problem{sample.id, render_input(cfg.prompt, sample.text), sample.label,
                              cfg.perturb_prompt};
        SearchContext ctx(*res.model, ledger, problem, res.constraints, cfg.budget,
                          example_seed(cfg.seed, sample.id), res.retry, shared_cache.get());
        OutcomeRecord rec;
        rec.index = k;
        rec.truth = sample.label;
        rec.original_example = sample.text;
        rec.outcome = run_strategy(res.strategy, ctx);
        auto line = to_json(rec).dump() + "\n";
        std::lock_guard lock(log_mu);
        log << line;
        log.flush();
        ++written;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::max<std::size_t>(1, cfg.workers); ++w) pool.emplace_back(worker);
  }
  log.close();
  if (failure) std::rethrow_exception(failure);

  auto report = report_from_log(paths.log, nlohmann::json::parse(meta.dump()));
  detail::write_file(paths.report_json, emit_report(report, ReportFormat::kJson));
  detail::write_file(paths.report_md, emit_report(report, ReportFormat::kMarkdown));
  return report;
}

}  // namespace ritfis
