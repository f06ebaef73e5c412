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
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ritfis/error.hpp"

namespace ritfis {

namespace utf8 {

// Length in bytes of the sequence introduced by lead byte `c`. Invalid lead
// bytes are treated as single-byte sequences.
inline std::size_t sequence_length(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xE) return 3;
  if ((c >> 3) == 0x1E) return 4;
  return 1;
}

inline char32_t decode(std::string_view s, std::size_t pos, std::size_t len) {
  auto b = [&](std::size_t i) { return static_cast<unsigned char>(s[pos + i]); };
  switch (len) {
    case 2: return ((b(0) & 0x1F) << 6) | (b(1) & 0x3F);
    case 3: return ((b(0) & 0x0F) << 12) | ((b(1) & 0x3F) << 6) | (b(2) & 0x3F);
    case 4:
      return ((b(0) & 0x07) << 18) | ((b(1) & 0x3F) << 12) | ((b(2) & 0x3F) << 6) |
             (b(3) & 0x3F);
    default: return b(0);
  }
}

// Splits `s` into code points, each kept as its UTF-8 byte string.
inline std::vector<std::string> split(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = std::min(sequence_length(static_cast<unsigned char>(s[i])), s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

}  // namespace utf8

// ASCII-only lowercase; non-ASCII bytes pass through.
inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

enum class TokenKind { kWord, kNumber, kPunct };

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::kWord: return "WORD";
    case TokenKind::kNumber: return "NUMBER";
    case TokenKind::kPunct: return "PUNCT";
  }
  return "?";
}

struct Token {
  std::string surface;
  std::size_t start_byte = 0;
  TokenKind kind = TokenKind::kWord;

  // WORD and NUMBER tokens are the units counted as words in change rates.
  bool is_word() const { return kind != TokenKind::kPunct; }

  friend bool operator==(const Token&, const Token&) = default;
};

// Token sequence plus the whitespace around every token. gaps[i] precedes
// tokens[i]; gaps.back() trails the last token, so gaps.size() is always
// tokens.size() + 1 and gaps interleaved with surfaces reproduce `source`.
struct TokenizedText {
  std::vector<Token> tokens;
  std::vector<std::string> gaps{std::string()};
  std::string source;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }

  std::size_t word_count(std::size_t begin = 0) const {
    return static_cast<std::size_t>(std::count_if(
        tokens.begin() + static_cast<std::ptrdiff_t>(std::min(begin, tokens.size())),
        tokens.end(), [](const Token& t) { return t.is_word(); }));
  }

  // Rebuilds offsets and source from the current surfaces and gaps.
  void reflow() {
    source.clear();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      source += gaps[i];
      tokens[i].start_byte = source.size();
      source += tokens[i].surface;
    }
    source += gaps.back();
  }

  static TokenizedText assemble(std::vector<Token> tokens, std::vector<std::string> gaps) {
    if (gaps.size() != tokens.size() + 1) throw Error("token/gap count mismatch");
    TokenizedText t;
    t.tokens = std::move(tokens);
    t.gaps = std::move(gaps);
    t.reflow();
    return t;
  }

  friend bool operator==(const TokenizedText&, const TokenizedText&) = default;
};

namespace detail {

enum class CharClass { kSpace, kWord, kPunct };

inline CharClass classify(char32_t cp) {
  if (cp < 0x80) {
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v')
      return CharClass::kSpace;
    if (std::isalnum(static_cast<int>(cp)) || cp == '\'') return CharClass::kWord;
    return CharClass::kPunct;
  }
  // Latin-1 punctuation/symbols and the general punctuation block, except the
  // typographic apostrophe which joins words like the ASCII one.
  if (cp == 0x2019) return CharClass::kWord;
  if ((cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7) return CharClass::kPunct;
  if (cp >= 0x2000 && cp <= 0x206F) return CharClass::kPunct;
  if (cp >= 0x3000 && cp <= 0x303F) return CharClass::kPunct;
  return CharClass::kWord;
}

inline bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

// Words are maximal runs of letters, digits and apostrophes; every other
// non-space code point is its own PUNCT token.
inline TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.source = std::string(text);
  out.gaps.clear();
  std::string gap;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len =
        std::min(utf8::sequence_length(static_cast<unsigned char>(text[i])), text.size() - i);
    auto cls = detail::classify(utf8::decode(text, i, len));
    if (cls == detail::CharClass::kSpace) {
      gap.append(text.substr(i, len));
      i += len;
      continue;
    }
    out.gaps.push_back(std::move(gap));
    gap.clear();
    Token tok;
    tok.start_byte = i;
    if (cls == detail::CharClass::kPunct) {
      tok.surface = std::string(text.substr(i, len));
      tok.kind = TokenKind::kPunct;
      i += len;
    } else {
      std::size_t j = i;
      while (j < text.size()) {
        std::size_t l =
            std::min(utf8::sequence_length(static_cast<unsigned char>(text[j])), text.size() - j);
        if (detail::classify(utf8::decode(text, j, l)) != detail::CharClass::kWord) break;
        j += l;
      }
      tok.surface = std::string(text.substr(i, j - i));
      tok.kind = detail::all_digits(tok.surface) ? TokenKind::kNumber : TokenKind::kWord;
      i = j;
    }
    out.tokens.push_back(std::move(tok));
  }
  out.gaps.push_back(std::move(gap));
  return out;
}

inline std::string detokenize(const TokenizedText& t) {
  std::string out;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    out += t.gaps[i];
    out += t.tokens[i].surface;
  }
  out += t.gaps.back();
  return out;
}

// Ordered, duplicate-free label space. Order is the tie-breaking order.
class LabelSet {
 public:
  LabelSet() = default;

  explicit LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw Error("label set needs at least two labels");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second)
        throw Error("duplicate label in label set: " + labels_[i]);
    }
  }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  const std::string& operator[](std::size_t i) const { return labels_[i]; }
  bool contains(const std::string& label) const { return index_.count(label) != 0; }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("unknown label: " + label);
    return it->second;
  }

  friend bool operator==(const LabelSet& a, const LabelSet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TextSample {
  std::string id;
  std::string text;
  std::string label;
};

struct Dataset {
  std::string name;
  std::vector<TextSample> samples;
  LabelSet label_set;

  std::size_t size() const { return samples.size(); }
};

enum class DatasetFormat { kJsonl, kCsv };

namespace detail {

inline void add_sample(Dataset& ds, std::unordered_set<std::string>& seen, std::string id,
                       std::string text, std::string label, std::size_t line) {
  const auto where = " (line " + std::to_string(line) + ")";
  if (trim(text).empty()) throw DatasetError("empty text" + where);
  if (!ds.label_set.contains(label))
    throw DatasetError("unknown label '" + label + "'" + where);
  if (id.empty()) id = std::to_string(ds.samples.size());
  if (!seen.insert(id).second) throw DatasetError("duplicate id '" + id + "'" + where);
  ds.samples.push_back({std::move(id), std::move(text), std::move(label)});
}

inline void parse_jsonl(std::istream& in, Dataset& ds) {
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError("malformed record (line " + std::to_string(lineno) + "): " + e.what());
    }
    if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string() ||
        !rec.contains("label") || !rec["label"].is_string())
      throw DatasetError("malformed record (line " + std::to_string(lineno) +
                         "): needs string fields 'text' and 'label'");
    std::string id;
    if (rec.contains("id")) {
      const auto& v = rec["id"];
      if (v.is_string()) id = v.get<std::string>();
      else if (v.is_number_integer()) id = std::to_string(v.get<long long>());
      else throw DatasetError("malformed record (line " + std::to_string(lineno) + "): bad id");
    }
    add_sample(ds, seen, std::move(id), rec["text"].get<std::string>(),
               rec["label"].get<std::string>(), lineno);
  }
}

// RFC-4180 record reader. Returns false at end of input; `line` tracks the
// physical line a record starts on.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                            std::size_t& start_line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  start_line = line + 1;
  std::string field;
  bool quoted = false, was_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r' && in.peek() == '\n') {
      // folded into the newline below
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field += c;
    }
  }
  if (quoted) throw DatasetError("unterminated quoted field (line " + std::to_string(start_line) + ")");
  ++line;
  fields.push_back(std::move(field));
  return true;
}

inline void parse_csv(std::istream& in, Dataset& ds) {
  std::vector<std::string> fields;
  std::size_t line = 0, start = 0;
  if (!read_csv_record(in, fields, line, start)) throw DatasetError("empty CSV file");
  long text_col = -1, label_col = -1, id_col = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto name = trim(fields[i]);
    if (name == "text") text_col = static_cast<long>(i);
    else if (name == "label") label_col = static_cast<long>(i);
    else if (name == "id") id_col = static_cast<long>(i);
  }
  if (text_col < 0 || label_col < 0)
    throw DatasetError("CSV header must name columns 'text' and 'label' (line 1)");
  std::unordered_set<std::string> seen;
  while (read_csv_record(in, fields, line, start)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() <= static_cast<std::size_t>(std::max({text_col, label_col, id_col})))
      throw DatasetError("malformed record (line " + std::to_string(start) + "): too few fields");
    std::string id = id_col >= 0 ? fields[static_cast<std::size_t>(id_col)] : std::string();
    add_sample(ds, seen, std::move(id), fields[static_cast<std::size_t>(text_col)],
               fields[static_cast<std::size_t>(label_col)], start);
  }
}

}  // namespace detail

inline Dataset parse_dataset(std::istream& in, DatasetFormat format, const LabelSet& label_set,
                             std::string name = {}) {
  Dataset ds;
  ds.name = std::move(name);
  ds.label_set = label_set;
  if (format == DatasetFormat::kJsonl) detail::parse_jsonl(in, ds);
  else detail::parse_csv(in, ds);
  return ds;
}

inline Dataset load_dataset(const std::string& path, DatasetFormat format,
                            const LabelSet& label_set, std::string name = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset: " + path);
  return parse_dataset(in, format, label_set, std::move(name));
}

struct PromptTemplate {
  std::string prefix;
  std::string separator = " ";
};

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct ModelInput {
  std::string full_text;
  ByteRange prompt_span;
  ByteRange example_span;

  std::string_view prompt() const {
    return std::string_view(full_text).substr(prompt_span.begin, prompt_span.size());
  }
  std::string_view example() const {
    return std::string_view(full_text).substr(example_span.begin, example_span.size());
  }
};

inline ModelInput render_input(const PromptTemplate& p, std::string_view example_text) {
  ModelInput in;
  in.full_text = p.prefix + p.separator + std::string(example_text);
  in.prompt_span = {0, p.prefix.size()};
  in.example_span = {p.prefix.size() + p.separator.size(), in.full_text.size()};
  return in;
}

// Tokenization of a rendered input with the prompt/example boundary kept as a
// token index. Prompt and example are tokenized separately.
struct InputTokens {
  TokenizedText text;
  std::size_t example_begin = 0;
};

inline InputTokens tokenize_input(const ModelInput& input) {
  auto prompt = tokenize(input.prompt());
  auto example = tokenize(input.example());
  InputTokens out;
  out.example_begin = prompt.size();
  std::vector<Token> tokens = std::move(prompt.tokens);
  std::vector<std::string> gaps = std::move(prompt.gaps);
  auto joint = std::string_view(input.full_text)
                   .substr(input.prompt_span.end, input.example_span.begin - input.prompt_span.end);
  gaps.back() += std::string(joint) + example.gaps.front();
  for (std::size_t i = 0; i < example.tokens.size(); ++i) {
    tokens.push_back(std::move(example.tokens[i]));
    gaps.push_back(std::move(example.gaps[i + 1]));
  }
  out.text = TokenizedText::assemble(std::move(tokens), std::move(gaps));
  return out;
}

}  // namespace ritfis
