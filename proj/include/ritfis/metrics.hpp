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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "ritfis/search.hpp"

namespace ritfis {

// One line of the outcome log: a search outcome plus the example it ran on.
struct OutcomeRecord {
  // Position of the example in the campaign's sample list.
  std::size_t index = 0;
  std::string truth;
  std::string original_example;
  SearchOutcome outcome;
};

// ---------------------------------------------------------------------------
// Indicators

inline double success_rate(const std::vector<SearchOutcome>& outcomes) {
  if (outcomes.empty()) throw Error("success rate of an empty outcome set");
  std::size_t n_suc = 0;
  for (const auto& o : outcomes) n_suc += o.status == OutcomeStatus::kSuccess;
  return static_cast<double>(n_suc) / static_cast<double>(outcomes.size());
}

namespace detail {

template <typename F>
std::optional<double> mean_over_successes(const std::vector<SearchOutcome>& outcomes, F&& f) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (o.status != OutcomeStatus::kSuccess) continue;
    sum += f(o);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace detail

// Mean over successes of changed words / region word count; nullopt when
// there are no successes.
inline std::optional<double> change_rate(const std::vector<SearchOutcome>& outcomes) {
  return detail::mean_over_successes(outcomes, [](const SearchOutcome& o) {
    return o.region_words == 0
               ? 0.0
               : static_cast<double>(o.word_diff) / static_cast<double>(o.region_words);
  });
}

inline std::optional<double> time_overhead(const std::vector<SearchOutcome>& outcomes) {
  return detail::mean_over_successes(outcomes,
                                     [](const SearchOutcome& o) { return o.elapsed_seconds; });
}

inline std::optional<double> query_number(const std::vector<SearchOutcome>& outcomes) {
  return detail::mean_over_successes(
      outcomes, [](const SearchOutcome& o) { return static_cast<double>(o.queries_used); });
}

// ---------------------------------------------------------------------------
// Perplexity

// Lowercased surfaces of every token, punctuation included.
inline std::vector<std::string> ppl_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text).tokens) out.push_back(to_lower(t.surface));
  return out;
}

// Additively smoothed bigram model:
//   p(w | v) = (count(v, w) + alpha) / (count(v) + alpha * V)
// where count(v) counts v as a history and the first token of a sequence is
// conditioned on a begin-of-sequence context. V is the number of distinct
// training types plus one slot for unseen words, unless fixed up front.
class NgramScorer {
 public:
  static constexpr const char* kBos = "<s>";

  explicit NgramScorer(double alpha = 1.0) : alpha_(alpha) {
    if (!(alpha > 0)) throw Error("smoothing constant must be positive");
  }

  // A scorer with no counts over a fixed vocabulary: every token has
  // probability 1/V.
  static NgramScorer uniform(std::size_t vocab_size, double alpha = 1.0) {
    if (vocab_size == 0) throw Error("vocabulary size must be at least 1");
    NgramScorer s(alpha);
    s.fixed_vocab_ = vocab_size;
    return s;
  }

  void train(const std::vector<std::string>& tokens) {
    std::string prev = kBos;
    for (const auto& t : tokens) {
      ++bigrams_[prev][t];
      ++history_[prev];
      types_.insert(t);
      prev = t;
    }
  }

  void train_text(std::string_view text) { train(ppl_tokens(text)); }

  std::size_t vocab_size() const { return fixed_vocab_ ? *fixed_vocab_ : types_.size() + 1; }
  double alpha() const { return alpha_; }

  double log_prob(const std::string& prev, const std::string& token) const {
    double pair = 0, hist = 0;
    if (auto it = bigrams_.find(prev); it != bigrams_.end()) {
      if (auto jt = it->second.find(token); jt != it->second.end())
        pair = static_cast<double>(jt->second);
    }
    if (auto it = history_.find(prev); it != history_.end()) hist = static_cast<double>(it->second);
    return std::log((pair + alpha_) / (hist + alpha_ * static_cast<double>(vocab_size())));
  }

  std::string describe() const {
    std::ostringstream os;
    os << "bigram add-" << alpha_ << " V=" << vocab_size();
    return os.str();
  }

 private:
  double alpha_;
  std::optional<std::size_t> fixed_vocab_;
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> bigrams_;
  std::unordered_map<std::string, std::size_t> history_;
  std::unordered_set<std::string> types_;
};

inline double perplexity(const NgramScorer& scorer, const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error("perplexity of an empty token sequence");
  double sum = 0;
  std::string prev = NgramScorer::kBos;
  for (const auto& t : tokens) {
    sum += scorer.log_prob(prev, t);
    prev = t;
  }
  return std::exp(-sum / static_cast<double>(tokens.size()));
}

// ---------------------------------------------------------------------------
// Outcome serialization

inline nlohmann::ordered_json to_json(const Edit& e) {
  return {{"position", e.position}, {"kind", to_string(e.kind)}, {"before", e.before},
          {"after", e.after}};
}

inline Edit edit_from_json(const nlohmann::json& j) {
  return {j.at("position").get<std::size_t>(), edit_kind_from_string(j.at("kind").get<std::string>()),
          j.at("before").get<std::string>(), j.at("after").get<std::string>()};
}

inline nlohmann::ordered_json to_json(const OutcomeRecord& r) {
  const auto& o = r.outcome;
  nlohmann::ordered_json j;
  j["sample_id"] = o.sample_id;
  j["index"] = r.index;
  j["status"] = to_string(o.status);
  j["truth"] = r.truth;
  j["final_label"] = o.final_label;
  j["original_example"] = r.original_example;
  j["final_example"] = o.final_example;
  j["final_text"] = o.final_text;
  j["edits"] = nlohmann::ordered_json::array();
  for (const auto& e : o.edits) j["edits"].push_back(to_json(e));
  j["word_diff"] = o.word_diff;
  j["region_words"] = o.region_words;
  j["queries_used"] = o.queries_used;
  j["elapsed_seconds"] = o.elapsed_seconds;
  j["score_trace"] = o.score_trace;
  return j;
}

inline OutcomeRecord record_from_json(const nlohmann::json& j) {
  OutcomeRecord r;
  auto& o = r.outcome;
  o.sample_id = j.at("sample_id").get<std::string>();
  r.index = j.at("index").get<std::size_t>();
  o.status = outcome_status_from_string(j.at("status").get<std::string>());
  r.truth = j.at("truth").get<std::string>();
  o.final_label = j.at("final_label").get<std::string>();
  r.original_example = j.at("original_example").get<std::string>();
  o.final_example = j.at("final_example").get<std::string>();
  o.final_text = j.at("final_text").get<std::string>();
  for (const auto& e : j.at("edits")) o.edits.push_back(edit_from_json(e));
  o.word_diff = j.at("word_diff").get<std::size_t>();
  o.region_words = j.at("region_words").get<std::size_t>();
  o.queries_used = j.at("queries_used").get<std::size_t>();
  o.elapsed_seconds = j.at("elapsed_seconds").get<double>();
  o.score_trace = j.at("score_trace").get<std::vector<double>>();
  return r;
}

// Reads an outcome log. A malformed final line (an interrupted write) is
// dropped; malformed lines elsewhere are errors.
inline std::vector<OutcomeRecord> read_outcome_log(const std::string& path) {
  std::vector<OutcomeRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!trim(line).empty()) lines.push_back(std::move(line));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(record_from_json(nlohmann::json::parse(lines[i])));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) break;
      throw Error("corrupt outcome log " + path + " line " + std::to_string(i + 1) + ": " +
                  e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Campaign report

inline constexpr int kReportSchemaVersion = 1;

struct CampaignInfo {
  std::string dataset;
  std::string method;
  std::string prompt;
  std::string model;
  std::uint64_t seed = 0;
  std::string config_hash;
  nlohmann::ordered_json verbalizer;
  std::string scorer;
  std::string tokenizer = "rule-based words (letters/digits/apostrophes) + single-char punctuation";
  std::vector<std::string> samples;
};

struct Metrics {
  double s_rate = 0;
  std::optional<double> c_rate, ppl, t_o, q_n;
  std::size_t n = 0;
  std::size_t n_suc = 0;
};

struct CampaignReport {
  CampaignInfo campaign;
  Metrics metrics;
  std::vector<OutcomeRecord> examples;
};

// PPL of every success's final example under `scorer`, averaged.
inline std::optional<double> mean_perplexity(const NgramScorer& scorer,
                                             const std::vector<OutcomeRecord>& records) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.outcome.status != OutcomeStatus::kSuccess) continue;
    auto toks = ppl_tokens(r.outcome.final_example);
    if (toks.empty()) continue;
    sum += perplexity(scorer, toks);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Default PPL scorer: trained on the original examples of the campaign.
inline NgramScorer scorer_from_records(const std::vector<OutcomeRecord>& records,
                                       double alpha = 1.0) {
  NgramScorer s(alpha);
  for (const auto& r : records) s.train_text(r.original_example);
  return s;
}

inline Metrics compute_metrics(const std::vector<OutcomeRecord>& records,
                               const NgramScorer& scorer) {
  std::vector<SearchOutcome> outcomes;
  for (const auto& r : records) outcomes.push_back(r.outcome);
  Metrics m;
  m.n = outcomes.size();
  for (const auto& o : outcomes) m.n_suc += o.status == OutcomeStatus::kSuccess;
  m.s_rate = outcomes.empty() ? 0.0 : success_rate(outcomes);
  m.c_rate = change_rate(outcomes);
  m.t_o = time_overhead(outcomes);
  m.q_n = query_number(outcomes);
  m.ppl = mean_perplexity(scorer, records);
  return m;
}

inline CampaignReport build_report(CampaignInfo info, std::vector<OutcomeRecord> records,
                                   const NgramScorer& scorer) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.index < b.index; });
  CampaignReport r;
  r.campaign = std::move(info);
  r.campaign.scorer = scorer.describe();
  r.metrics = compute_metrics(records, scorer);
  r.examples = std::move(records);
  return r;
}

namespace detail {

inline nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

inline std::optional<double> opt_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const CampaignReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  auto& c = j["campaign"];
  c["dataset"] = r.campaign.dataset;
  c["method"] = r.campaign.method;
  c["prompt"] = r.campaign.prompt;
  c["model"] = r.campaign.model;
  c["seed"] = r.campaign.seed;
  c["config_hash"] = r.campaign.config_hash;
  c["verbalizer"] = r.campaign.verbalizer;
  c["scorer"] = r.campaign.scorer;
  c["tokenizer"] = r.campaign.tokenizer;
  c["samples"] = r.campaign.samples;
  auto& m = j["metrics"];
  m["s_rate"] = r.metrics.s_rate;
  m["c_rate"] = detail::opt(r.metrics.c_rate);
  m["ppl"] = detail::opt(r.metrics.ppl);
  m["t_o"] = detail::opt(r.metrics.t_o);
  m["q_n"] = detail::opt(r.metrics.q_n);
  m["n"] = r.metrics.n;
  m["n_suc"] = r.metrics.n_suc;
  j["examples"] = nlohmann::ordered_json::array();
  for (const auto& e : r.examples) j["examples"].push_back(to_json(e));
  return j;
}

inline CampaignReport report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion)
    throw Error("unsupported report schema version");
  CampaignReport r;
  const auto& c = j.at("campaign");
  r.campaign.dataset = c.at("dataset").get<std::string>();
  r.campaign.method = c.at("method").get<std::string>();
  r.campaign.prompt = c.at("prompt").get<std::string>();
  r.campaign.model = c.at("model").get<std::string>();
  r.campaign.seed = c.at("seed").get<std::uint64_t>();
  r.campaign.config_hash = c.at("config_hash").get<std::string>();
  r.campaign.verbalizer = nlohmann::ordered_json::parse(c.at("verbalizer").dump());
  r.campaign.scorer = c.at("scorer").get<std::string>();
  r.campaign.tokenizer = c.at("tokenizer").get<std::string>();
  r.campaign.samples = c.at("samples").get<std::vector<std::string>>();
  const auto& m = j.at("metrics");
  r.metrics.s_rate = m.at("s_rate").get<double>();
  r.metrics.c_rate = detail::opt_from(m.at("c_rate"));
  r.metrics.ppl = detail::opt_from(m.at("ppl"));
  r.metrics.t_o = detail::opt_from(m.at("t_o"));
  r.metrics.q_n = detail::opt_from(m.at("q_n"));
  r.metrics.n = m.at("n").get<std::size_t>();
  r.metrics.n_suc = m.at("n_suc").get<std::size_t>();
  for (const auto& e : j.at("examples")) r.examples.push_back(record_from_json(e));
  return r;
}

enum class ReportFormat { kJson, kMarkdown };

inline std::string format_metric(const std::optional<double>& v) {
  if (!v) return "\xE2\x80\x94";  // undefined value
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

inline constexpr const char* kMarkdownHeader = "| Method | S-rate | C-rate | PPL | T-O | Q-N |";

// One table per dataset, one row per method, columns in the order
// S-rate, C-rate, PPL, T-O, Q-N.
inline std::string emit_markdown(const std::vector<CampaignReport>& reports) {
  std::vector<std::string> datasets;
  for (const auto& r : reports)
    if (std::find(datasets.begin(), datasets.end(), r.campaign.dataset) == datasets.end())
      datasets.push_back(r.campaign.dataset);
  std::ostringstream os;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (d) os << "\n";
    os << "### " << (datasets[d].empty() ? "dataset" : datasets[d]) << "\n\n";
    os << kMarkdownHeader << "\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& r : reports) {
      if (r.campaign.dataset != datasets[d]) continue;
      const auto& m = r.metrics;
      os << "| " << r.campaign.method << " | " << format_metric(m.s_rate) << " | "
         << format_metric(m.c_rate) << " | " << format_metric(m.ppl) << " | "
         << format_metric(m.t_o) << " | " << format_metric(m.q_n) << " |\n";
    }
  }
  return os.str();
}

inline std::string emit_report(const CampaignReport& report, ReportFormat format) {
  if (format == ReportFormat::kMarkdown) return emit_markdown({report});
  return to_json(report).dump(2) + "\n";
}

}  // namespace ritfis
