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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "ritfis/http_model.hpp"
#include "ritfis/presets.hpp"
#include "ritfis/text.hpp"
#include "ritfis/toml.hpp"

namespace ritfis {

struct CampaignConfig {
  std::filesystem::path source;  // config file, for diagnostics

  // [dataset]
  std::filesystem::path dataset_path;
  DatasetFormat dataset_format = DatasetFormat::kJsonl;
  std::string dataset_name;
  LabelSet label_set;
  std::optional<std::size_t> sample_size;

  PromptTemplate prompt;

  // [model]
  std::string model_kind = "surrogate";
  std::filesystem::path lexicon_path;
  HttpModelOptions http;
  Verbalizer verbalizer;

  // [method]
  std::string preset = "textfooler";
  std::optional<std::filesystem::path> synonyms_path;
  std::size_t top_k = 50;
  std::vector<std::string> fragments;
  Placement placement = Placement::kTail;
  std::size_t checklist_count = 30;
  std::vector<std::string> operators;
  std::size_t beam_width = 4;

  // [constraints]
  std::optional<std::filesystem::path> stop_words_path;
  std::optional<std::filesystem::path> blacklist_path;
  std::optional<std::filesystem::path> pos_lexicon_path;
  double max_change_rate = 0.2;
  std::size_t max_edits = 20;
  bool forbid_re_edit = true;

  Budget budget;
  int retry_attempts = 3;
  long long retry_base_delay_ms = 1000;

  // [ppl]
  std::optional<std::filesystem::path> ppl_corpus;
  double ppl_alpha = 1.0;

  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir = "ritfis-out";
  bool perturb_prompt = false;

  std::vector<std::string> warnings;
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& root, std::filesystem::path base)
      : root_(root), base_(std::move(base)) {}

  // Rejects any key of `table` (named `name`) outside `allowed`.
  static void check_keys(const nlohmann::json& table, const std::string& name,
                         const std::set<std::string>& allowed) {
    for (const auto& [k, _] : table.items()) {
      if (!allowed.count(k)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw ConfigError("unknown key '" + (name.empty() ? k : name + "." + k) + "' (valid: " +
                          list + ")");
      }
    }
  }

  static const nlohmann::json* table(const nlohmann::json& parent, const std::string& key,
                                     const std::string& name) {
    if (!parent.contains(key)) return nullptr;
    const auto& t = parent.at(key);
    if (!t.is_object()) throw ConfigError("'" + name + "' must be a table");
    return &t;
  }

  template <typename T>
  static std::optional<T> get(const nlohmann::json* t, const std::string& key,
                              const std::string& name) {
    if (!t || !t->contains(key)) return std::nullopt;
    const auto& v = t->at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
        return v.get<double>();
      } else if constexpr (std::is_same_v<T, long long>) {
        if (!v.is_number_integer()) throw ConfigError("");
        return v.get<long long>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
        return v.get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
        return v.get<std::string>();
      } else {
        if (!v.is_array()) throw ConfigError("");
        for (const auto& e : v)
          if (!e.is_string()) throw ConfigError("");
        return v.get<std::vector<std::string>>();
      }
    } catch (const ConfigError&) {
      throw ConfigError("key '" + name + "." + key + "' has the wrong type");
    }
  }

  template <typename T>
  static T require(const nlohmann::json* t, const std::string& key, const std::string& name) {
    auto v = get<T>(t, key, name);
    if (!v) throw ConfigError("missing required key '" + (name.empty() ? key : name + "." + key) + "'");
    return *v;
  }

  std::filesystem::path file(const std::string& rel, const std::string& key) const {
    std::filesystem::path p(rel);
    if (p.is_relative()) p = base_ / p;
    if (!std::filesystem::exists(p))
      throw ConfigError("key '" + key + "' names a missing file: " + p.string());
    return p;
  }

  std::filesystem::path dir(const std::string& rel) const {
    std::filesystem::path p(rel);
    return p.is_relative() ? base_ / p : p;
  }

  const nlohmann::json& root() const { return root_; }

 private:
  const nlohmann::json& root_;
  std::filesystem::path base_;
};

inline std::size_t positive(long long v, const std::string& key) {
  if (v < 1) throw ConfigError("key '" + key + "' out of range: must be >= 1");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline CampaignConfig parse_config(const nlohmann::json& root, const std::filesystem::path& base) {
  using detail::ConfigReader;
  using detail::positive;
  ConfigReader rd(root, base);
  CampaignConfig c;

  ConfigReader::check_keys(root, "",
                           {"seed", "workers", "output", "cache_dir", "perturb_prompt", "dataset",
                            "prompt", "model", "method", "constraints", "budget", "retry", "ppl"});
  if (auto v = ConfigReader::get<long long>(&root, "seed", "")) c.seed = static_cast<std::uint64_t>(*v);
  if (auto v = ConfigReader::get<long long>(&root, "workers", ""))
    c.workers = positive(*v, "workers");
  if (auto v = ConfigReader::get<std::string>(&root, "output", "")) c.output_dir = rd.dir(*v);
  if (auto v = ConfigReader::get<std::string>(&root, "cache_dir", "")) c.cache_dir = rd.dir(*v);
  if (auto v = ConfigReader::get<bool>(&root, "perturb_prompt", "")) c.perturb_prompt = *v;

  // [dataset]
  const auto* ds = ConfigReader::table(root, "dataset", "dataset");
  if (!ds) throw ConfigError("missing required table 'dataset'");
  ConfigReader::check_keys(*ds, "dataset", {"path", "format", "name", "labels", "sample_size"});
  c.dataset_path = rd.file(ConfigReader::require<std::string>(ds, "path", "dataset"), "dataset.path");
  auto fmt = ConfigReader::get<std::string>(ds, "format", "dataset").value_or("jsonl");
  if (fmt == "jsonl") c.dataset_format = DatasetFormat::kJsonl;
  else if (fmt == "csv") c.dataset_format = DatasetFormat::kCsv;
  else throw ConfigError("key 'dataset.format' must be 'jsonl' or 'csv'");
  c.dataset_name = ConfigReader::get<std::string>(ds, "name", "dataset")
                       .value_or(c.dataset_path.stem().string());
  try {
    c.label_set = LabelSet(ConfigReader::require<std::vector<std::string>>(ds, "labels", "dataset"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("key 'dataset.labels': ") + e.what());
  }
  if (auto v = ConfigReader::get<long long>(ds, "sample_size", "dataset"))
    c.sample_size = positive(*v, "dataset.sample_size");

  // [prompt]
  const auto* pr = ConfigReader::table(root, "prompt", "prompt");
  if (!pr) throw ConfigError("missing required table 'prompt'");
  ConfigReader::check_keys(*pr, "prompt", {"prefix", "separator"});
  c.prompt.prefix = ConfigReader::require<std::string>(pr, "prefix", "prompt");
  if (c.prompt.prefix.empty()) throw ConfigError("key 'prompt.prefix' must be non-empty");
  c.prompt.separator = ConfigReader::get<std::string>(pr, "separator", "prompt").value_or(" ");

  // [model]
  const auto* md = ConfigReader::table(root, "model", "model");
  if (!md) throw ConfigError("missing required table 'model'");
  ConfigReader::check_keys(*md, "model",
                           {"kind", "lexicon", "base_url", "path", "name", "temperature",
                            "timeout_seconds", "max_in_flight", "min_interval_ms", "verbalizer",
                            "confidence_pattern", "api_key_env"});
  c.model_kind = ConfigReader::require<std::string>(md, "kind", "model");
  c.verbalizer = Verbalizer::identity(c.label_set);
  if (c.model_kind == "surrogate") {
    c.lexicon_path = rd.file(ConfigReader::require<std::string>(md, "lexicon", "model"), "model.lexicon");
  } else if (c.model_kind == "http") {
    c.http.base_url = ConfigReader::require<std::string>(md, "base_url", "model");
    c.http.model = ConfigReader::require<std::string>(md, "name", "model");
    if (auto v = ConfigReader::get<std::string>(md, "path", "model")) c.http.path = *v;
    if (auto v = ConfigReader::get<std::string>(md, "api_key_env", "model")) c.http.api_key_env = *v;
    if (auto v = ConfigReader::get<double>(md, "temperature", "model")) c.http.temperature = *v;
    if (auto v = ConfigReader::get<long long>(md, "timeout_seconds", "model"))
      c.http.timeout_seconds = static_cast<int>(positive(*v, "model.timeout_seconds"));
    if (auto v = ConfigReader::get<long long>(md, "max_in_flight", "model"))
      c.http.max_in_flight = positive(*v, "model.max_in_flight");
    if (auto v = ConfigReader::get<long long>(md, "min_interval_ms", "model")) {
      if (*v < 0) throw ConfigError("key 'model.min_interval_ms' out of range: must be >= 0");
      c.http.min_interval = std::chrono::milliseconds(*v);
    }
    if (c.http.temperature != 0.0)
      c.warnings.push_back("model.temperature is nonzero: the threat model is nondeterministic");
    if (const auto* vb = ConfigReader::table(*md, "verbalizer", "model.verbalizer")) {
      c.verbalizer.patterns.clear();
      for (const auto& l : c.label_set.labels()) {
        if (!vb->contains(l)) throw ConfigError("missing required key 'model.verbalizer." + l + "'");
        c.verbalizer.patterns.push_back(
            {l, ConfigReader::require<std::vector<std::string>>(vb, l, "model.verbalizer")});
      }
      for (const auto& [k, _] : vb->items())
        if (!c.label_set.contains(k))
          throw ConfigError("unknown key 'model.verbalizer." + k + "' (not a label)");
    }
    if (auto v = ConfigReader::get<std::string>(md, "confidence_pattern", "model"))
      c.verbalizer.confidence_pattern = *v;
    c.verbalizer.validate(c.label_set);
  } else {
    throw ConfigError("key 'model.kind' must be 'surrogate' or 'http'");
  }

  // [method]
  const auto* me = ConfigReader::table(root, "method", "method");
  if (!me) throw ConfigError("missing required table 'method'");
  ConfigReader::check_keys(*me, "method",
                           {"preset", "synonyms", "top_k", "fragments", "fragments_file",
                            "placement", "checklist_count", "operators", "beam_width"});
  c.preset = ConfigReader::require<std::string>(me, "preset", "method");
  if (!is_preset(c.preset)) {
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("key 'method.preset': unknown preset '" + c.preset + "' (valid: " + list + ")");
  }
  if (auto v = ConfigReader::get<std::string>(me, "synonyms", "method"))
    c.synonyms_path = rd.file(*v, "method.synonyms");
  if (auto v = ConfigReader::get<long long>(me, "top_k", "method")) c.top_k = positive(*v, "method.top_k");
  if (auto v = ConfigReader::get<std::vector<std::string>>(me, "fragments", "method")) c.fragments = *v;
  if (auto v = ConfigReader::get<std::string>(me, "fragments_file", "method")) {
    if (!c.fragments.empty())
      throw ConfigError("keys 'method.fragments' and 'method.fragments_file' are exclusive");
    std::ifstream in(rd.file(*v, "method.fragments_file"));
    for (std::string line; std::getline(in, line);)
      if (auto t = trim(line); !t.empty() && t[0] != '#') c.fragments.push_back(t);
  }
  for (const auto& f : c.fragments)
    if (trim(f).empty()) throw ConfigError("key 'method.fragments' contains an empty fragment");
  if (auto v = ConfigReader::get<std::string>(me, "placement", "method")) {
    if (*v == "head") c.placement = Placement::kHead;
    else if (*v == "tail") c.placement = Placement::kTail;
    else throw ConfigError("key 'method.placement' must be 'head' or 'tail'");
  }
  if (auto v = ConfigReader::get<long long>(me, "checklist_count", "method"))
    c.checklist_count = positive(*v, "method.checklist_count");
  if (auto v = ConfigReader::get<std::vector<std::string>>(me, "operators", "method")) {
    for (const auto& op : *v) make_transformation(op, std::make_shared<SynonymTable>(), 1);
    c.operators = *v;
  }
  if (auto v = ConfigReader::get<long long>(me, "beam_width", "method"))
    c.beam_width = positive(*v, "method.beam_width");
  if ((c.preset == "textfooler" || c.preset == "pwws") && !c.synonyms_path)
    throw ConfigError("missing required key 'method.synonyms' for preset '" + c.preset + "'");
  if (std::find(c.operators.begin(), c.operators.end(), "synonym") != c.operators.end() &&
      !c.synonyms_path)
    throw ConfigError("missing required key 'method.synonyms' for operator 'synonym'");
  // Fragment presets default to no change-rate limit.
  if (c.preset == "stresstest" || c.preset == "checklist") c.max_change_rate = 1.0;

  // [constraints]
  if (const auto* cs = ConfigReader::table(root, "constraints", "constraints")) {
    ConfigReader::check_keys(*cs, "constraints",
                             {"stop_words", "blacklist", "pos_lexicon", "max_change_rate",
                              "max_edits", "forbid_re_edit"});
    if (auto v = ConfigReader::get<std::string>(cs, "stop_words", "constraints"))
      c.stop_words_path = rd.file(*v, "constraints.stop_words");
    if (auto v = ConfigReader::get<std::string>(cs, "blacklist", "constraints"))
      c.blacklist_path = rd.file(*v, "constraints.blacklist");
    if (auto v = ConfigReader::get<std::string>(cs, "pos_lexicon", "constraints"))
      c.pos_lexicon_path = rd.file(*v, "constraints.pos_lexicon");
    if (auto v = ConfigReader::get<double>(cs, "max_change_rate", "constraints")) {
      if (!(*v > 0.0 && *v <= 1.0))
        throw ConfigError("key 'constraints.max_change_rate' out of range: must be in (0, 1]");
      c.max_change_rate = *v;
    }
    if (auto v = ConfigReader::get<long long>(cs, "max_edits", "constraints"))
      c.max_edits = positive(*v, "constraints.max_edits");
    if (auto v = ConfigReader::get<bool>(cs, "forbid_re_edit", "constraints")) c.forbid_re_edit = *v;
  }

  // [budget]
  if (const auto* b = ConfigReader::table(root, "budget", "budget")) {
    ConfigReader::check_keys(*b, "budget", {"max_queries", "max_seconds"});
    if (auto v = ConfigReader::get<long long>(b, "max_queries", "budget"))
      c.budget.max_queries = positive(*v, "budget.max_queries");
    if (auto v = ConfigReader::get<double>(b, "max_seconds", "budget")) {
      if (!(*v > 0)) throw ConfigError("key 'budget.max_seconds' out of range: must be > 0");
      c.budget.max_seconds = *v;
    }
  }

  // [retry]
  if (const auto* r = ConfigReader::table(root, "retry", "retry")) {
    ConfigReader::check_keys(*r, "retry", {"max_attempts", "base_delay_ms"});
    if (auto v = ConfigReader::get<long long>(r, "max_attempts", "retry"))
      c.retry_attempts = static_cast<int>(positive(*v, "retry.max_attempts"));
    if (auto v = ConfigReader::get<long long>(r, "base_delay_ms", "retry")) {
      if (*v < 0) throw ConfigError("key 'retry.base_delay_ms' out of range: must be >= 0");
      c.retry_base_delay_ms = *v;
    }
  }

  // [ppl]
  if (const auto* p = ConfigReader::table(root, "ppl", "ppl")) {
    ConfigReader::check_keys(*p, "ppl", {"corpus", "alpha"});
    if (auto v = ConfigReader::get<std::string>(p, "corpus", "ppl")) c.ppl_corpus = rd.file(*v, "ppl.corpus");
    if (auto v = ConfigReader::get<double>(p, "alpha", "ppl")) {
      if (!(*v > 0)) throw ConfigError("key 'ppl.alpha' out of range: must be > 0");
      c.ppl_alpha = *v;
    }
  }
  return c;
}

inline CampaignConfig load_config(const std::filesystem::path& path) {
  auto root = toml::parse_file(path.string());
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  auto c = parse_config(root, base);
  c.source = path;
  return c;
}

namespace detail {

inline std::string file_digest(const std::optional<std::filesystem::path>& p) {
  if (!p) return "";
  std::ifstream in(*p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace detail

// Hash of every setting that can change an outcome, with referenced files
// hashed by content. Worker count, output and cache locations are excluded.
inline std::string config_fingerprint(const CampaignConfig& c) {
  using detail::file_digest;
  nlohmann::ordered_json j;
  j["dataset"] = {{"content", file_digest(c.dataset_path)},
                  {"format", c.dataset_format == DatasetFormat::kJsonl ? "jsonl" : "csv"},
                  {"name", c.dataset_name},
                  {"labels", c.label_set.labels()},
                  {"sample_size", c.sample_size ? nlohmann::ordered_json(*c.sample_size)
                                                : nlohmann::ordered_json()}};
  j["prompt"] = {{"prefix", c.prompt.prefix}, {"separator", c.prompt.separator}};
  j["model"] = {{"kind", c.model_kind},
                {"lexicon", c.model_kind == "surrogate" ? file_digest(c.lexicon_path) : ""},
                {"base_url", c.http.base_url},
                {"name", c.http.model},
                {"temperature", c.http.temperature},
                {"verbalizer", c.verbalizer.to_json()}};
  j["method"] = {{"preset", c.preset},
                 {"synonyms", file_digest(c.synonyms_path)},
                 {"top_k", c.top_k},
                 {"fragments", c.fragments},
                 {"placement", c.placement == Placement::kHead ? "head" : "tail"},
                 {"checklist_count", c.checklist_count},
                 {"operators", c.operators},
                 {"beam_width", c.beam_width}};
  j["constraints"] = {{"stop_words", file_digest(c.stop_words_path)},
                      {"blacklist", file_digest(c.blacklist_path)},
                      {"pos_lexicon", file_digest(c.pos_lexicon_path)},
                      {"max_change_rate", c.max_change_rate},
                      {"max_edits", c.max_edits},
                      {"forbid_re_edit", c.forbid_re_edit}};
  j["budget"] = {{"max_queries", c.budget.max_queries}, {"max_seconds", c.budget.max_seconds}};
  j["retry"] = {{"max_attempts", c.retry_attempts}, {"base_delay_ms", c.retry_base_delay_ms}};
  j["ppl"] = {{"corpus", file_digest(c.ppl_corpus)}, {"alpha", c.ppl_alpha}};
  j["seed"] = c.seed;
  j["perturb_prompt"] = c.perturb_prompt;
  return sha256_hex(j.dump());
}

}  // namespace ritfis
