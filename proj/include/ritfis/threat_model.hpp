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

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ritfis/error.hpp"
#include "ritfis/text.hpp"

namespace ritfis {

// Normalized label confidences in LabelSet order.
struct Prediction {
  std::vector<std::pair<std::string, double>> scores;
  std::string top_label;
  std::string raw_response;

  double score(const std::string& label) const {
    for (const auto& [l, s] : scores)
      if (l == label) return s;
    throw Error("label not in prediction: " + label);
  }

  // Normalizes `confidences` (aligned with `labels`) to sum 1 and picks the
  // argmax, ties going to the earlier label.
  static Prediction make(const LabelSet& labels, std::vector<double> confidences,
                         std::string raw = {}) {
    if (confidences.size() != labels.size()) throw Error("confidence count != label count");
    double sum = 0;
    for (double c : confidences) {
      if (!(c >= 0) || !std::isfinite(c)) throw Error("confidence must be finite and >= 0");
      sum += c;
    }
    Prediction p;
    p.raw_response = std::move(raw);
    std::size_t best = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      double v = sum > 0 ? confidences[i] / sum : 1.0 / static_cast<double>(labels.size());
      p.scores.emplace_back(labels[i], v);
      if (v > p.scores[best].second) best = i;
    }
    p.top_label = labels[best];
    return p;
  }
};

// Maps free-text replies onto labels.
struct Verbalizer {
  std::vector<std::pair<std::string, std::vector<std::string>>> patterns;
  std::optional<std::string> confidence_pattern;

  static inline const char* kDefaultConfidencePattern =
      R"((?:confidence|score|probability)[^0-9]{0,20}([0-9]*\.?[0-9]+))";

  // One trigger per label: the label name itself.
  static Verbalizer identity(const LabelSet& labels) {
    Verbalizer v;
    for (const auto& l : labels.labels()) v.patterns.push_back({l, {l}});
    v.confidence_pattern = kDefaultConfidencePattern;
    return v;
  }

  void validate(const LabelSet& labels) const {
    std::unordered_map<std::string, std::string> owner;
    for (const auto& l : labels.labels()) {
      auto it = std::find_if(patterns.begin(), patterns.end(),
                             [&](const auto& p) { return p.first == l; });
      if (it == patterns.end() || it->second.empty())
        throw ConfigError("verbalizer has no trigger for label '" + l + "'");
    }
    for (const auto& [label, triggers] : patterns) {
      if (!labels.contains(label)) throw ConfigError("verbalizer names unknown label '" + label + "'");
      for (const auto& t : triggers) {
        auto key = to_lower(t);
        auto [it, fresh] = owner.emplace(key, label);
        if (!fresh && it->second != label)
          throw ConfigError("verbalizer trigger '" + t + "' is shared by labels '" + it->second +
                            "' and '" + label + "'");
      }
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto& pats = j["patterns"];
    pats = nlohmann::ordered_json::object();
    for (const auto& [label, triggers] : patterns) pats[label] = triggers;
    j["confidence_pattern"] =
        confidence_pattern ? nlohmann::ordered_json(*confidence_pattern) : nlohmann::ordered_json();
    return j;
  }
};

namespace detail {

inline bool is_alnum_byte(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
}

// Earliest whole-word, case-insensitive occurrence of `needle` in `hay`.
inline std::size_t find_word(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return std::string::npos;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    bool left = pos == 0 || !is_alnum_byte(hay[pos - 1]);
    auto end = pos + needle.size();
    bool right = end == hay.size() || !is_alnum_byte(hay[end]);
    if (left && right) return pos;
  }
  return std::string::npos;
}

}  // namespace detail

// Reads a label and optional confidence out of a free-text reply. The label
// whose trigger occurs earliest wins; equal positions go to LabelSet order.
// A confidence c is honoured only when 1/k < c <= 1, so the named label stays
// the argmax; otherwise the reply is treated as carrying no confidence.
inline Prediction parse_label(const std::string& raw, const Verbalizer& v, const LabelSet& ls) {
  auto hay = to_lower(raw);
  std::size_t best_pos = std::string::npos;
  std::size_t best_label = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto it = std::find_if(v.patterns.begin(), v.patterns.end(),
                           [&](const auto& p) { return p.first == ls[i]; });
    if (it == v.patterns.end()) continue;
    for (const auto& trig : it->second) {
      auto pos = detail::find_word(hay, to_lower(trig));
      if (pos < best_pos) {
        best_pos = pos;
        best_label = i;
      }
    }
  }
  if (best_pos == std::string::npos) throw LabelParseFailed(raw);

  const auto k = static_cast<double>(ls.size());
  double top = 1.0;
  if (v.confidence_pattern) {
    std::smatch m;
    std::regex re(*v.confidence_pattern, std::regex::icase);
    if (std::regex_search(hay, m, re) && m.size() > 1) {
      double c = std::strtod(m[1].str().c_str(), nullptr);
      if (c > 1.0 / k && c <= 1.0) top = c;
    }
  }
  std::vector<double> conf(ls.size(), (1.0 - top) / (k - 1.0));
  conf[best_label] = top;
  auto p = Prediction::make(ls, std::move(conf), raw);
  p.top_label = ls[best_label];
  return p;
}

// Keyword-weight classifier used as an offline, deterministic model.
struct SurrogateLexicon {
  std::map<std::string, double> bias;
  std::map<std::string, std::map<std::string, double>> weights;

  double weight(const std::string& label, const std::string& word) const {
    auto it = weights.find(label);
    if (it == weights.end()) return 0.0;
    auto w = it->second.find(word);
    return w == it->second.end() ? 0.0 : w->second;
  }

  void validate(const LabelSet& ls) const {
    bool any = false;
    for (const auto& [label, ws] : weights) {
      if (!ls.contains(label)) throw ConfigError("lexicon names unknown label '" + label + "'");
      for (const auto& [w, x] : ws) any = any || x != 0.0;
    }
    for (const auto& [label, b] : bias)
      if (!ls.contains(label)) throw ConfigError("lexicon bias names unknown label '" + label + "'");
    if (!any) throw ConfigError("surrogate lexicon has no nonzero weight");
  }

  static SurrogateLexicon from_json(const nlohmann::json& j) {
    SurrogateLexicon lex;
    if (!j.is_object()) throw ConfigError("surrogate lexicon must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (key != "bias" && key != "weights") throw ConfigError("unknown lexicon key '" + key + "'");
    if (j.contains("bias"))
      for (const auto& [label, v] : j["bias"].items()) lex.bias[label] = v.get<double>();
    if (j.contains("weights"))
      for (const auto& [label, ws] : j["weights"].items())
        for (const auto& [word, v] : ws.items()) lex.weights[label][to_lower(word)] = v.get<double>();
    return lex;
  }

  static SurrogateLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open surrogate lexicon: " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad surrogate lexicon " + path + ": " + e.what());
    }
  }
};

// Softmax over bias + summed word weights of the example span. The prompt
// span never contributes.
inline Prediction surrogate_classify(const SurrogateLexicon& lex, const ModelInput& input,
                                     const LabelSet& ls) {
  auto toks = tokenize(input.example());
  std::vector<double> logits(ls.size(), 0.0);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    auto b = lex.bias.find(ls[i]);
    logits[i] = b == lex.bias.end() ? 0.0 : b->second;
    for (const auto& t : toks.tokens) logits[i] += lex.weight(ls[i], to_lower(t.surface));
  }
  double mx = *std::max_element(logits.begin(), logits.end());
  for (auto& x : logits) x = std::exp(x - mx);
  return Prediction::make(ls, std::move(logits), "surrogate");
}

// The system under test.
class ThreatModel {
 public:
  virtual ~ThreatModel() = default;

  // One model invocation. Throws QueryFailed on transport errors and
  // LabelParseFailed when the reply cannot be mapped onto a label.
  virtual Prediction predict(const ModelInput& input) const = 0;

  virtual const LabelSet& labels() const = 0;
  virtual std::string describe() const = 0;

  // Throws QueryFailed when the backend cannot be reached at all.
  virtual void check_reachable() const {}
};

class SurrogateModel : public ThreatModel {
 public:
  SurrogateModel(SurrogateLexicon lex, LabelSet labels)
      : lex_(std::move(lex)), labels_(std::move(labels)) {}

  Prediction predict(const ModelInput& input) const override {
    return surrogate_classify(lex_, input, labels_);
  }
  const LabelSet& labels() const override { return labels_; }
  std::string describe() const override { return "surrogate"; }

  const SurrogateLexicon& lexicon() const { return lex_; }

 private:
  SurrogateLexicon lex_;
  LabelSet labels_;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

// Query counts and wall time per example. Internally synchronized.
class QueryLedger {
 public:
  void record_query(const std::string& sample_id) {
    std::lock_guard lock(mu_);
    ++total_;
    ++per_example_[sample_id];
  }

  void set_elapsed(const std::string& sample_id, double seconds) {
    std::lock_guard lock(mu_);
    wall_clock_[sample_id] = seconds;
  }

  std::size_t total() const {
    std::lock_guard lock(mu_);
    return total_;
  }

  std::size_t queries(const std::string& sample_id) const {
    std::lock_guard lock(mu_);
    auto it = per_example_.find(sample_id);
    return it == per_example_.end() ? 0 : it->second;
  }

  double elapsed(const std::string& sample_id) const {
    std::lock_guard lock(mu_);
    auto it = wall_clock_.find(sample_id);
    return it == wall_clock_.end() ? 0.0 : it->second;
  }

  std::size_t per_example_sum() const {
    std::lock_guard lock(mu_);
    std::size_t s = 0;
    for (const auto& [_, n] : per_example_) s += n;
    return s;
  }

 private:
  mutable std::mutex mu_;
  std::size_t total_ = 0;
  std::unordered_map<std::string, std::size_t> per_example_;
  std::unordered_map<std::string, double> wall_clock_;
};

// Content-addressed response store keyed by SHA-256 of the full input text,
// optionally mirrored to a directory of JSON records.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
  }

  std::optional<Prediction> lookup(const std::string& full_text, const LabelSet& ls) {
    auto key = sha256_hex(full_text);
    {
      std::lock_guard lock(mu_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    if (!dir_) return std::nullopt;
    std::ifstream in(*dir_ / (key + ".json"));
    if (!in) return std::nullopt;
    try {
      auto j = nlohmann::json::parse(in);
      if (j.at("full_text").get<std::string>() != full_text) return std::nullopt;
      std::vector<double> conf;
      for (const auto& l : ls.labels()) conf.push_back(j.at("scores").at(l).get<double>());
      auto p = Prediction::make(ls, std::move(conf), j.at("raw_response").get<std::string>());
      p.top_label = j.at("top_label").get<std::string>();
      std::lock_guard lock(mu_);
      entries_.emplace(key, p);
      return p;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void store(const std::string& full_text, const Prediction& p) {
    auto key = sha256_hex(full_text);
    {
      std::lock_guard lock(mu_);
      entries_.insert_or_assign(key, p);
    }
    if (!dir_) return;
    nlohmann::ordered_json j;
    j["full_text"] = full_text;
    j["top_label"] = p.top_label;
    j["raw_response"] = p.raw_response;
    for (const auto& [l, s] : p.scores) j["scores"][l] = s;
    auto final_path = *dir_ / (key + ".json");
    auto tmp = final_path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp);
      out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp, final_path);
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, Prediction> entries_;
  std::optional<std::filesystem::path> dir_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  std::chrono::milliseconds delay_before(int attempt) const {
    // attempt is 1-based; no delay before the first one.
    if (attempt <= 1) return std::chrono::milliseconds(0);
    return std::chrono::milliseconds(static_cast<long long>(
        static_cast<double>(base_delay.count()) * std::pow(factor, attempt - 2)));
  }
};

// One logical query. A cache hit costs nothing; a miss is recorded in the
// ledger exactly once regardless of how many retries it takes.
inline Prediction query(const ThreatModel& model, const ModelInput& input, QueryLedger& ledger,
                        ResponseCache* cache, const std::string& sample_id,
                        const RetryPolicy& retry = {}) {
  if (cache)
    if (auto hit = cache->lookup(input.full_text, model.labels())) return *hit;
  ledger.record_query(sample_id);
  for (int attempt = 1;; ++attempt) {
    if (auto d = retry.delay_before(attempt); d.count() > 0 && retry.sleep) retry.sleep(d);
    try {
      auto p = model.predict(input);
      if (cache) cache->store(input.full_text, p);
      return p;
    } catch (const QueryFailed&) {
      if (attempt >= retry.max_attempts) throw;
    } catch (const LabelParseFailed&) {
      if (attempt >= retry.max_attempts) throw;
    }
  }
}

}  // namespace ritfis
