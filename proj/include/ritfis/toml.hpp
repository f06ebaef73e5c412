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
#include <fstream>
#include <sstream>
#include <string>
#include <set>
#include <string_view>

#include "json.hpp"
#include "ritfis/error.hpp"

// Reader for the TOML subset used by campaign files: tables and dotted
// tables, bare/quoted/dotted keys, basic and literal strings, integers,
// floats, booleans, arrays (nested, multi-line) and inline tables. Dates,
// multi-line strings and arrays of tables are rejected.

namespace ritfis::toml {

class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ConfigError("TOML line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : s_(src) {}

  nlohmann::json parse() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        if (peek(1) == '[') fail("arrays of tables are not supported");
        ++pos_;
        skip_ws();
        auto path = parse_key_path();
        skip_ws();
        expect(']');
        table = &open_table(root, path, true);
      } else {
        auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        auto value = parse_value();
        auto* target = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &child_table(*target, path[i]);
        if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
        (*target)[path.back()] = std::move(value);
      }
      skip_ws();
      if (!eof() && peek() == '#') skip_comment();
      if (!eof() && !at_newline()) fail("expected end of line");
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t off = 0) const { return pos_ + off < s_.size() ? s_[pos_ + off] : '\0'; }
  bool at_newline() const { return peek() == '\n' || (peek() == '\r' && peek(1) == '\n'); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') ++pos_;
      else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') skip_comment();
      else break;
    }
  }

  static bool bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path;
    while (true) {
      skip_ws();
      if (peek() == '"') path.push_back(parse_basic_string());
      else if (peek() == '\'') path.push_back(parse_literal_string());
      else {
        auto start = pos_;
        while (!eof() && bare_key_char(peek())) ++pos_;
        if (start == pos_) fail("expected a key");
        path.emplace_back(s_.substr(start, pos_ - start));
      }
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
    }
    return path;
  }

  nlohmann::json& child_table(nlohmann::json& parent, const std::string& key) {
    auto& v = parent[key];
    if (v.is_null()) v = nlohmann::json::object();
    if (!v.is_object()) fail("key '" + key + "' is not a table");
    return v;
  }

  nlohmann::json& open_table(nlohmann::json& root, const std::vector<std::string>& path,
                             bool header) {
    nlohmann::json* t = &root;
    for (const auto& k : path) t = &child_table(*t, k);
    std::string joined;
    for (const auto& k : path) joined += (joined.empty() ? "" : ".") + k;
    if (header && !defined_tables_.insert(joined).second) fail("table [" + joined + "] defined twice");
    return *t;
  }

  nlohmann::json parse_value() {
    char c = peek();
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || at_newline()) fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          std::size_t n = e == 'u' ? 4 : 8;
          if (pos_ + n > s_.size()) fail("truncated unicode escape");
          auto cp = static_cast<char32_t>(std::stoul(std::string(s_.substr(pos_, n)), nullptr, 16));
          pos_ += n;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("invalid escape \\") + e);
      }
    }
    return out;
  }

  static void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string parse_literal_string() {
    expect('\'');
    auto start = pos_;
    while (!eof() && peek() != '\'' && !at_newline()) ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  nlohmann::json parse_array() {
    expect('[');
    auto arr = nlohmann::json::array();
    while (true) {
      skip_ws_comments_newlines();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(parse_value());
      skip_ws_comments_newlines();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws_comments_newlines();
      expect(']');
      return arr;
    }
  }

  nlohmann::json parse_inline_table() {
    expect('{');
    auto obj = nlohmann::json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      auto* target = &obj;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &child_table(*target, path[i]);
      if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
      (*target)[path.back()] = parse_value();
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect('}');
      return obj;
    }
  }

  nlohmann::json parse_number() {
    auto start = pos_;
    while (!eof()) {
      char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E' ||
          c == '_')
        ++pos_;
      else
        break;
    }
    std::string text;
    for (char c : s_.substr(start, pos_ - start))
      if (c != '_') text += c;
    if (text.empty()) fail("expected a value");
    bool is_float = text.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        double v = std::stod(text, &used);
        if (used != text.size()) fail("malformed number '" + text + "'");
        return v;
      }
      long long v = std::stoll(text, &used, 10);
      if (used != text.size()) fail("malformed number '" + text + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("malformed value '" + text + "'");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::set<std::string> defined_tables_;
};

}  // namespace detail

inline nlohmann::json parse(std::string_view text) { return detail::Parser(text).parse(); }

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace ritfis::toml
