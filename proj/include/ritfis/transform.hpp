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
#include <array>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ritfis/error.hpp"
#include "ritfis/text.hpp"

namespace ritfis {

// kSubstitute replaces a whole token surface (synonyms, word swaps), kChar
// replaces it with a character-level variant, kDelete removes the token and
// kAppend inserts a fragment before original token `position` (the token
// count for a tail append).
enum class EditKind { kSubstitute, kChar, kDelete, kAppend };

inline const char* to_string(EditKind k) {
  switch (k) {
    case EditKind::kSubstitute: return "SUBSTITUTE";
    case EditKind::kChar: return "CHAR";
    case EditKind::kDelete: return "DELETE";
    case EditKind::kAppend: return "APPEND";
  }
  return "?";
}

inline EditKind edit_kind_from_string(const std::string& s) {
  if (s == "SUBSTITUTE") return EditKind::kSubstitute;
  if (s == "CHAR") return EditKind::kChar;
  if (s == "DELETE") return EditKind::kDelete;
  if (s == "APPEND") return EditKind::kAppend;
  throw Error("unknown edit kind: " + s);
}

struct Edit {
  std::size_t position = 0;
  EditKind kind = EditKind::kSubstitute;
  std::string before;
  std::string after;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct Candidate {
  TokenizedText text;
  std::vector<Edit> edits;
  std::string origin;
};

enum class Placement { kHead, kTail };

// Result of replaying edits: the text plus, per token, the index of the
// original token it descends from (kAppended for fragment tokens).
struct Replay {
  static constexpr std::size_t kAppended = std::numeric_limits<std::size_t>::max();

  TokenizedText text;
  std::vector<std::size_t> origin;

  std::optional<std::size_t> current_index(std::size_t original_position) const {
    for (std::size_t i = 0; i < origin.size(); ++i)
      if (origin[i] == original_position) return i;
    return std::nullopt;
  }
};

// Stable sort by position; edits at the same position keep their order.
inline void sort_edits(std::vector<Edit>& edits) {
  std::stable_sort(edits.begin(), edits.end(),
                   [](const Edit& a, const Edit& b) { return a.position < b.position; });
}

inline Replay replay_edits(const TokenizedText& original, const std::vector<Edit>& edits) {
  Replay r;
  std::vector<Token> tokens = original.tokens;
  std::vector<std::string> gaps = original.gaps;
  r.origin.resize(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) r.origin[i] = i;

  auto find = [&](std::size_t p) -> std::size_t {
    for (std::size_t i = 0; i < r.origin.size(); ++i)
      if (r.origin[i] == p) return i;
    throw ReplayError("edit targets missing token position " + std::to_string(p));
  };

  for (const auto& e : edits) {
    switch (e.kind) {
      case EditKind::kSubstitute:
      case EditKind::kChar: {
        auto i = find(e.position);
        if (tokens[i].surface != e.before)
          throw ReplayError("edit at position " + std::to_string(e.position) + " expects '" +
                            e.before + "' but found '" + tokens[i].surface + "'");
        tokens[i].surface = e.after;
        break;
      }
      case EditKind::kDelete: {
        auto i = find(e.position);
        if (tokens[i].surface != e.before)
          throw ReplayError("delete at position " + std::to_string(e.position) + " expects '" +
                            e.before + "' but found '" + tokens[i].surface + "'");
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i));
        r.origin.erase(r.origin.begin() + static_cast<std::ptrdiff_t>(i));
        // Keep the whitespace in front of the removed token; for the last
        // token keep the trailing whitespace instead.
        const bool last = i + 1 == gaps.size() - 1;
        gaps.erase(gaps.begin() + static_cast<std::ptrdiff_t>(last && i > 0 ? i : i + 1));
        break;
      }
      case EditKind::kAppend: {
        if (!e.before.empty()) throw ReplayError("append edit must have an empty 'before'");
        auto frag = tokenize(e.after);
        if (frag.empty()) throw ReplayError("append fragment has no tokens");
        std::size_t k = tokens.size();
        for (std::size_t i = 0; i < r.origin.size(); ++i) {
          if (r.origin[i] != Replay::kAppended && r.origin[i] >= e.position) {
            k = i;
            break;
          }
        }
        std::vector<std::string> new_gaps;
        if (k < tokens.size()) {
          new_gaps.push_back(gaps[k]);
          for (std::size_t j = 1; j < frag.size(); ++j) new_gaps.push_back(frag.gaps[j]);
          new_gaps.push_back(" ");
          gaps.erase(gaps.begin() + static_cast<std::ptrdiff_t>(k));
          gaps.insert(gaps.begin() + static_cast<std::ptrdiff_t>(k), new_gaps.begin(),
                      new_gaps.end());
        } else {
          new_gaps.push_back(tokens.empty() ? gaps.back() : std::string(" "));
          for (std::size_t j = 1; j < frag.size(); ++j) new_gaps.push_back(frag.gaps[j]);
          auto trailing = tokens.empty() ? std::string() : gaps.back();
          gaps.pop_back();
          gaps.insert(gaps.end(), new_gaps.begin(), new_gaps.end());
          gaps.push_back(trailing);
        }
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(k), frag.tokens.begin(),
                      frag.tokens.end());
        r.origin.insert(r.origin.begin() + static_cast<std::ptrdiff_t>(k), frag.size(),
                        Replay::kAppended);
        break;
      }
    }
  }
  r.text = TokenizedText::assemble(std::move(tokens), std::move(gaps));
  return r;
}

inline TokenizedText apply_edits(const TokenizedText& original, const std::vector<Edit>& edits) {
  return replay_edits(original, edits).text;
}

// ---------------------------------------------------------------------------
// Word-level operators

// Maps lowercase words to synonyms ordered by descending similarity.
class SynonymTable {
 public:
  void add(const std::string& word, const std::string& synonym, double similarity) {
    auto w = to_lower(word);
    auto s = to_lower(synonym);
    if (w == s || w.empty() || s.empty()) return;
    auto& list = entries_[w];
    for (const auto& [existing, _] : list)
      if (existing == s) return;
    list.emplace_back(s, similarity);
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
  }

  const std::vector<std::pair<std::string, double>>& lookup(const std::string& word) const {
    static const std::vector<std::pair<std::string, double>> kEmpty;
    auto it = entries_.find(to_lower(word));
    return it == entries_.end() ? kEmpty : it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // TSV: word<TAB>synonym<TAB>similarity
  static SynonymTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open synonym table: " + path);
    SynonymTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty() || line[0] == '#') continue;
      auto a = line.find('\t');
      auto b = a == std::string::npos ? a : line.find('\t', a + 1);
      if (b == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected word<TAB>synonym<TAB>similarity");
      double sim = 0;
      try {
        sim = std::stod(line.substr(b + 1));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad similarity");
      }
      if (sim < 0 || sim > 1) throw ConfigError(path + ":" + std::to_string(lineno) + ": similarity outside [0,1]");
      t.add(line.substr(0, a), line.substr(a + 1, b - a - 1), sim);
    }
    return t;
  }

 private:
  std::map<std::string, std::vector<std::pair<std::string, double>>> entries_;
};

// Applies the case pattern of `original` (lower, Capitalized, UPPER) to
// `replacement`.
inline std::string match_case(const std::string& original, const std::string& replacement) {
  auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto is_lower = [](char c) { return c >= 'a' && c <= 'z'; };
  bool has_lower = std::any_of(original.begin(), original.end(), is_lower);
  bool has_upper = std::any_of(original.begin(), original.end(), is_upper);
  std::string out = to_lower(replacement);
  if (has_upper && !has_lower && original.size() > 1) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!original.empty() && is_upper(original[0]) && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

namespace detail {

inline Candidate single_edit(const TokenizedText& t, Edit e, std::string origin) {
  Candidate c;
  c.edits.push_back(std::move(e));
  c.text = apply_edits(t, c.edits);
  c.origin = std::move(origin);
  return c;
}

inline void check_position(const TokenizedText& t, std::size_t position) {
  if (position >= t.size())
    throw Error("token position " + std::to_string(position) + " out of range (" +
                std::to_string(t.size()) + " tokens)");
}

}  // namespace detail

inline std::vector<Candidate> word_synonym_candidates(const TokenizedText& t, std::size_t position,
                                                      const SynonymTable& table, std::size_t k) {
  detail::check_position(t, position);
  std::vector<Candidate> out;
  const auto& tok = t[position];
  if (tok.kind != TokenKind::kWord) return out;
  for (const auto& [syn, _] : table.lookup(tok.surface)) {
    if (out.size() >= k) break;
    out.push_back(detail::single_edit(
        t, {position, EditKind::kSubstitute, tok.surface, match_case(tok.surface, syn)}, "synonym"));
  }
  return out;
}

enum class WordEditKind { kDelete, kSwapWithNext };

// Word deletion and swapping with the following word. A swap is recorded as
// two substitutions so each touched position carries its own edit.
inline std::vector<Candidate> word_edits(const TokenizedText& t, std::size_t position,
                                         const std::vector<WordEditKind>& kinds) {
  detail::check_position(t, position);
  std::vector<Candidate> out;
  const auto& tok = t[position];
  if (tok.kind != TokenKind::kWord) return out;
  for (auto kind : kinds) {
    if (kind == WordEditKind::kDelete) {
      out.push_back(detail::single_edit(t, {position, EditKind::kDelete, tok.surface, ""},
                                        "word_delete"));
    } else if (position + 1 < t.size() && t[position + 1].kind == TokenKind::kWord &&
               t[position + 1].surface != tok.surface) {
      Candidate c;
      c.edits = {{position, EditKind::kSubstitute, tok.surface, t[position + 1].surface},
                 {position + 1, EditKind::kSubstitute, t[position + 1].surface, tok.surface}};
      c.text = apply_edits(t, c.edits);
      c.origin = "word_swap";
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Attaches `fragment` at the head or tail of `t` with a single-space joint.
inline Candidate sentence_append(const TokenizedText& t, const std::string& fragment,
                                 Placement where) {
  if (trim(fragment).empty()) throw Error("append fragment must be non-empty");
  Edit e{where == Placement::kHead ? 0 : t.size(), EditKind::kAppend, "", trim(fragment)};
  return detail::single_edit(t, std::move(e), "append");
}

// ---------------------------------------------------------------------------
// Character-level operators

enum class CharEditKind { kInsert, kDelete, kSwapAdjacent, kSubstituteNeighbor, kSubstituteHomoglyph };

inline constexpr std::array<CharEditKind, 5> kAllCharEdits = {
    CharEditKind::kInsert, CharEditKind::kDelete, CharEditKind::kSwapAdjacent,
    CharEditKind::kSubstituteNeighbor, CharEditKind::kSubstituteHomoglyph};

inline const char* to_string(CharEditKind k) {
  switch (k) {
    case CharEditKind::kInsert: return "char_insert";
    case CharEditKind::kDelete: return "char_delete";
    case CharEditKind::kSwapAdjacent: return "char_swap";
    case CharEditKind::kSubstituteNeighbor: return "char_neighbor";
    case CharEditKind::kSubstituteHomoglyph: return "char_homoglyph";
  }
  return "?";
}

// QWERTY adjacency of lowercase letters.
inline const std::map<char, std::string>& qwerty_neighbors() {
  static const std::map<char, std::string> kMap = {
      {'q', "wa"},   {'w', "qeas"},   {'e', "wrsd"},  {'r', "etdf"},   {'t', "ryfg"},
      {'y', "tugh"}, {'u', "yihj"},   {'i', "uojk"},  {'o', "ipkl"},   {'p', "ol"},
      {'a', "qwsz"}, {'s', "weadzx"}, {'d', "erfsxc"}, {'f', "rtgdcv"}, {'g', "tyhfvb"},
      {'h', "yujgbn"}, {'j', "uikhnm"}, {'k', "iojlm"}, {'l', "opk"}, {'z', "asx"},
      {'x', "zsdc"}, {'c', "xdfv"},   {'v', "cfgb"},  {'b', "vghn"},   {'n', "bhjm"},
      {'m', "njk"}};
  return kMap;
}

// Visually confusable replacements.
inline const std::map<char, std::string>& homoglyphs() {
  static const std::map<char, std::string> kMap = {{'o', "0"}, {'l', "1"}, {'a', "@"},
                                                   {'e', "3"}, {'i', "1"}, {'s', "$"}};
  return kMap;
}

// Character variants of the word at `position`. The first character is never
// moved, deleted or preceded by an insertion; substitutions may hit any slot.
// INSERT and SUBSTITUTE_NEIGHBOR draw their letter from `rng`.
inline std::vector<Candidate> char_edits(const TokenizedText& t, std::size_t position,
                                         const std::vector<CharEditKind>& kinds,
                                         std::mt19937_64& rng) {
  detail::check_position(t, position);
  std::vector<Candidate> out;
  const auto& tok = t[position];
  if (tok.kind != TokenKind::kWord) return out;
  const auto chars = utf8::split(tok.surface);
  const std::size_t n = chars.size();
  auto join = [](const std::vector<std::string>& cs) {
    std::string s;
    for (const auto& c : cs) s += c;
    return s;
  };
  std::set<std::string> seen;
  auto emit = [&](std::string surface, CharEditKind kind) {
    if (surface == tok.surface || !seen.insert(surface).second) return;
    out.push_back(detail::single_edit(t, {position, EditKind::kChar, tok.surface, std::move(surface)},
                                      to_string(kind)));
  };

  for (auto kind : kinds) {
    seen.clear();
    switch (kind) {
      case CharEditKind::kInsert:
        for (std::size_t i = 1; i < n; ++i) {
          auto cs = chars;
          std::uniform_int_distribution<int> letter(0, 25);
          cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(i),
                    std::string(1, static_cast<char>('a' + letter(rng))));
          emit(join(cs), kind);
        }
        break;
      case CharEditKind::kDelete:
        if (n < 2) break;
        for (std::size_t i = 1; i < n; ++i) {
          auto cs = chars;
          cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(i));
          emit(join(cs), kind);
        }
        break;
      case CharEditKind::kSwapAdjacent:
        for (std::size_t i = 1; i + 1 < n; ++i) {
          auto cs = chars;
          std::swap(cs[i], cs[i + 1]);
          emit(join(cs), kind);
        }
        break;
      case CharEditKind::kSubstituteNeighbor:
        for (std::size_t i = 0; i < n; ++i) {
          if (chars[i].size() != 1) continue;
          char c = chars[i][0];
          bool upper = c >= 'A' && c <= 'Z';
          auto it = qwerty_neighbors().find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
          if (it == qwerty_neighbors().end()) continue;
          std::uniform_int_distribution<std::size_t> pick(0, it->second.size() - 1);
          char r = it->second[pick(rng)];
          auto cs = chars;
          cs[i] = std::string(1, upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(r))) : r);
          emit(join(cs), kind);
        }
        break;
      case CharEditKind::kSubstituteHomoglyph:
        for (std::size_t i = 0; i < n; ++i) {
          if (chars[i].size() != 1) continue;
          auto it = homoglyphs().find(
              static_cast<char>(std::tolower(static_cast<unsigned char>(chars[i][0]))));
          if (it == homoglyphs().end()) continue;
          auto cs = chars;
          cs[i] = it->second;
          emit(join(cs), kind);
        }
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pluggable transformations

// A perturbation operator. Word-level operators edit the token at `position`;
// text-level operators (templates, or a back-translation backend) ignore it
// and are invoked once per state.
class Transformation {
 public:
  virtual ~Transformation() = default;
  virtual std::string name() const = 0;
  virtual bool text_level() const { return false; }
  virtual std::vector<Candidate> generate(const TokenizedText& t, std::size_t position,
                                          std::mt19937_64& rng) const = 0;
};

class SynonymSwap : public Transformation {
 public:
  SynonymSwap(std::shared_ptr<const SynonymTable> table, std::size_t k)
      : table_(std::move(table)), k_(k) {}
  std::string name() const override { return "synonym"; }
  std::vector<Candidate> generate(const TokenizedText& t, std::size_t position,
                                  std::mt19937_64&) const override {
    return word_synonym_candidates(t, position, *table_, k_);
  }

 private:
  std::shared_ptr<const SynonymTable> table_;
  std::size_t k_;
};

class CharEdit : public Transformation {
 public:
  explicit CharEdit(CharEditKind kind) : kind_(kind) {}
  std::string name() const override { return to_string(kind_); }
  std::vector<Candidate> generate(const TokenizedText& t, std::size_t position,
                                  std::mt19937_64& rng) const override {
    return char_edits(t, position, {kind_}, rng);
  }

 private:
  CharEditKind kind_;
};

class WordEdit : public Transformation {
 public:
  explicit WordEdit(WordEditKind kind) : kind_(kind) {}
  std::string name() const override {
    return kind_ == WordEditKind::kDelete ? "word_delete" : "word_swap";
  }
  std::vector<Candidate> generate(const TokenizedText& t, std::size_t position,
                                  std::mt19937_64&) const override {
    return word_edits(t, position, {kind_});
  }

 private:
  WordEditKind kind_;
};

class TemplateAppend : public Transformation {
 public:
  TemplateAppend(std::vector<std::string> fragments, Placement where)
      : fragments_(std::move(fragments)), where_(where) {}
  std::string name() const override { return "append"; }
  bool text_level() const override { return true; }
  std::vector<Candidate> generate(const TokenizedText& t, std::size_t,
                                  std::mt19937_64&) const override {
    std::vector<Candidate> out;
    for (const auto& f : fragments_) out.push_back(sentence_append(t, f, where_));
    return out;
  }

 private:
  std::vector<std::string> fragments_;
  Placement where_;
};

using TransformationList = std::vector<std::shared_ptr<const Transformation>>;

// Builds an operator by its configuration name.
inline std::shared_ptr<const Transformation> make_transformation(
    const std::string& name, std::shared_ptr<const SynonymTable> synonyms, std::size_t top_k) {
  if (name == "synonym") {
    if (!synonyms) throw ConfigError("operator 'synonym' needs a synonym table");
    return std::make_shared<SynonymSwap>(std::move(synonyms), top_k);
  }
  for (auto k : kAllCharEdits)
    if (name == to_string(k)) return std::make_shared<CharEdit>(k);
  if (name == "word_delete") return std::make_shared<WordEdit>(WordEditKind::kDelete);
  if (name == "word_swap") return std::make_shared<WordEdit>(WordEditKind::kSwapWithNext);
  throw ConfigError("unknown operator '" + name +
                    "' (valid: synonym, char_insert, char_delete, char_swap, char_neighbor, "
                    "char_homoglyph, word_delete, word_swap)");
}

// ---------------------------------------------------------------------------
// Word diff and constraints

// Distinct original word positions touched by substitutions, character edits
// or deletions, plus the word count of every appended fragment. Punctuation
// edits count zero.
inline std::size_t word_diff(const TokenizedText& original, const TokenizedText& final_text,
                             const std::vector<Edit>& edits) {
  auto replayed = apply_edits(original, edits);
  if (replayed.tokens.size() != final_text.tokens.size())
    throw ReplayError("edits do not replay onto the final text (token count differs)");
  for (std::size_t i = 0; i < replayed.size(); ++i)
    if (replayed[i].surface != final_text[i].surface)
      throw ReplayError("edits do not replay onto the final text at token " + std::to_string(i));
  std::set<std::size_t> positions;
  std::size_t appended = 0;
  for (const auto& e : edits) {
    if (e.kind == EditKind::kAppend) {
      appended += tokenize(e.after).word_count();
    } else if (e.position < original.size() && original[e.position].is_word()) {
      positions.insert(e.position);
    }
  }
  return positions.size() + appended;
}

struct ConstraintSet {
  std::unordered_set<std::string> stop_words;
  std::optional<std::unordered_map<std::string, std::string>> pos_lexicon;
  double max_change_rate = 0.2;
  std::unordered_set<std::string> blacklist;
  std::size_t max_edits = 20;
  bool forbid_re_edit = true;

  bool is_stop_word(const std::string& w) const { return stop_words.count(to_lower(w)) != 0; }
};

// One lowercase word per line.
inline std::unordered_set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open word list: " + path);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (!w.empty() && w[0] != '#') out.insert(to_lower(w));
  }
  return out;
}

// TSV: word<TAB>tag
inline std::unordered_map<std::string, std::string> load_pos_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open POS lexicon: " + path);
  std::unordered_map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected word<TAB>tag");
    out[to_lower(trim(line.substr(0, tab)))] = trim(line.substr(tab + 1));
  }
  return out;
}

enum class ViolationKind { kStopword, kPosMismatch, kChangeRate, kBlacklist, kEditBudget, kReEdit };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kStopword: return "STOPWORD";
    case ViolationKind::kPosMismatch: return "POS_MISMATCH";
    case ViolationKind::kChangeRate: return "CHANGE_RATE";
    case ViolationKind::kBlacklist: return "BLACKLIST";
    case ViolationKind::kEditBudget: return "EDIT_BUDGET";
    case ViolationKind::kReEdit: return "RE_EDIT";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// All violations of `cand` against `original`; empty means PASS. The change
// rate is measured against the word tokens from `region_begin` onwards.
inline std::vector<Violation> check_constraints(const TokenizedText& original,
                                                const Candidate& cand, const ConstraintSet& cs,
                                                std::size_t region_begin = 0) {
  std::vector<Violation> out;
  const auto replay = replay_edits(original, cand.edits);

  std::map<std::size_t, std::size_t> touches;
  for (const auto& e : cand.edits)
    if (e.kind != EditKind::kAppend) ++touches[e.position];

  std::unordered_set<std::string> original_words;
  for (const auto& t : original.tokens) original_words.insert(to_lower(t.surface));

  for (const auto& [pos, count] : touches) {
    if (pos >= original.size()) continue;
    const auto& before = original[pos].surface;
    if (cs.is_stop_word(before))
      out.push_back({ViolationKind::kStopword, "'" + before + "' at " + std::to_string(pos)});
    if (cs.pos_lexicon) {
      if (auto cur = replay.current_index(pos)) {
        const auto& lex = *cs.pos_lexicon;
        auto a = lex.find(to_lower(before));
        auto b = lex.find(to_lower(replay.text[*cur].surface));
        if (a != lex.end() && b != lex.end() && a->second != b->second)
          out.push_back({ViolationKind::kPosMismatch,
                         "'" + before + "'/" + a->second + " -> '" + replay.text[*cur].surface +
                             "'/" + b->second});
      }
    }
    if (cs.forbid_re_edit && count > 1)
      out.push_back({ViolationKind::kReEdit, "position " + std::to_string(pos) + " edited " +
                                                 std::to_string(count) + " times"});
  }

  for (const auto& e : cand.edits) {
    if (e.kind == EditKind::kDelete) continue;
    for (const auto& t : tokenize(e.after).tokens) {
      auto w = to_lower(t.surface);
      if (cs.blacklist.count(w) && !original_words.count(w))
        out.push_back({ViolationKind::kBlacklist, "introduced '" + t.surface + "'"});
    }
  }

  const auto diff = word_diff(original, replay.text, cand.edits);
  const auto len = original.word_count(region_begin);
  if (diff > 0) {
    double rate = len == 0 ? std::numeric_limits<double>::infinity()
                           : static_cast<double>(diff) / static_cast<double>(len);
    if (rate > cs.max_change_rate)
      out.push_back({ViolationKind::kChangeRate, std::to_string(diff) + "/" + std::to_string(len) +
                                                     " words changed"});
  }

  if (cand.edits.size() > cs.max_edits)
    out.push_back({ViolationKind::kEditBudget, std::to_string(cand.edits.size()) + " edits"});
  return out;
}

}  // namespace ritfis
