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

#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "ritfis/text.hpp"

namespace ritfis {
namespace {

std::vector<std::string> surfaces(const TokenizedText& t) {
  std::vector<std::string> out;
  for (const auto& tok : t.tokens) out.push_back(tok.surface);
  return out;
}

TEST(Tokenize, SplitsWordsAndPunctuation) {
  auto t = tokenize("The movie wasn't great!");
  EXPECT_EQ(surfaces(t), (std::vector<std::string>{"The", "movie", "wasn't", "great", "!"}));
  EXPECT_EQ(t[4].kind, TokenKind::kPunct);
  EXPECT_EQ(t.word_count(), 4u);
}

TEST(Tokenize, NumbersAreTheirOwnKind) {
  auto t = tokenize("rated 10 of 10x");
  EXPECT_EQ(t[1].kind, TokenKind::kNumber);
  EXPECT_EQ(t[3].kind, TokenKind::kWord);
  EXPECT_TRUE(t[1].is_word());
}

TEST(Tokenize, EachPunctuationCharIsAToken) {
  auto t = tokenize("wait...what?!");
  EXPECT_EQ(surfaces(t), (std::vector<std::string>{"wait", ".", ".", ".", "what", "?", "!"}));
}

TEST(Tokenize, Utf8) {
  auto t = tokenize("caf\xC3\xA9 \xE2\x80\x94 it\xE2\x80\x99s fine");
  EXPECT_EQ(surfaces(t), (std::vector<std::string>{"caf\xC3\xA9", "\xE2\x80\x94", "it\xE2\x80\x99s", "fine"}));
  EXPECT_EQ(t[1].kind, TokenKind::kPunct);
}

TEST(Tokenize, RoundTripIsExact) {
  for (const char* s : {"", "   ", "a", "  lead and trail  ", "tab\there\nnewline", "x,y ,z , ",
                        "\xC2\xA1Hola!  \xC2\xBF"}) {
    auto t = tokenize(s);
    EXPECT_EQ(t.gaps.size(), t.size() + 1) << s;
    EXPECT_EQ(detokenize(t), s);
    auto copy = t;
    copy.reflow();
    EXPECT_EQ(copy.source, s);
  }
}

TEST(Tokenize, StartBytesPointAtSurfaces) {
  std::string s = "One,  two three.";
  auto t = tokenize(s);
  for (const auto& tok : t.tokens) EXPECT_EQ(s.substr(tok.start_byte, tok.surface.size()), tok.surface);
}

TEST(Tokenize, AssembleRejectsBadGaps) {
  EXPECT_THROW(TokenizedText::assemble({Token{"a", 0, TokenKind::kWord}}, {""}), Error);
}

TEST(LabelSet, Validation) {
  EXPECT_THROW(LabelSet({"only"}), Error);
  EXPECT_THROW(LabelSet({"a", "a"}), Error);
  LabelSet ls({"positive", "negative"});
  EXPECT_EQ(ls.index_of("negative"), 1u);
  EXPECT_TRUE(ls.contains("positive"));
  EXPECT_FALSE(ls.contains("neutral"));
}

TEST(Dataset, Jsonl) {
  std::istringstream in(
      "{\"id\": \"a\", \"text\": \"good\", \"label\": \"positive\"}\n"
      "\n"
      "{\"text\": \"bad\", \"label\": \"negative\"}\n");
  auto ds = parse_dataset(in, DatasetFormat::kJsonl, LabelSet({"positive", "negative"}), "d");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.samples[0].id, "a");
  EXPECT_EQ(ds.samples[1].id, "1");
  EXPECT_EQ(ds.samples[1].label, "negative");
}

TEST(Dataset, UnknownLabelNamesLine) {
  std::istringstream in(
      "{\"text\": \"good\", \"label\": \"positive\"}\n"
      "{\"text\": \"meh\", \"label\": \"neutral\"}\n");
  try {
    parse_dataset(in, DatasetFormat::kJsonl, LabelSet({"positive", "negative"}), "d");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown label 'neutral' (line 2)"), std::string::npos);
  }
}

TEST(Dataset, MalformedJsonl) {
  std::istringstream in("{\"text\": \"good\", \"label\": \"positive\"}\n{oops\n");
  try {
    parse_dataset(in, DatasetFormat::kJsonl, LabelSet({"positive", "negative"}), "d");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("malformed record (line 2)"), std::string::npos);
  }
}

TEST(Dataset, DuplicateIdAndEmptyText) {
  LabelSet ls({"positive", "negative"});
  std::istringstream dup(
      "{\"id\": \"x\", \"text\": \"a\", \"label\": \"positive\"}\n"
      "{\"id\": \"x\", \"text\": \"b\", \"label\": \"positive\"}\n");
  EXPECT_THROW(parse_dataset(dup, DatasetFormat::kJsonl, ls, "d"), DatasetError);
  std::istringstream empty("{\"text\": \"\", \"label\": \"positive\"}\n");
  EXPECT_THROW(parse_dataset(empty, DatasetFormat::kJsonl, ls, "d"), DatasetError);
}

TEST(Dataset, CsvWithQuotedFields) {
  std::istringstream in(
      "id,text,label\n"
      "r1,\"Good, really \"\"good\"\"\",positive\n"
      "r2,\"two\nlines\",negative\n");
  auto ds = parse_dataset(in, DatasetFormat::kCsv, LabelSet({"positive", "negative"}), "d");
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.samples[0].text, "Good, really \"good\"");
  EXPECT_EQ(ds.samples[1].text, "two\nlines");
}

TEST(Dataset, CsvErrorReportsRecordStartLine) {
  std::istringstream in(
      "text,label\n"
      "\"multi\nline\",positive\n"
      "fine,unknown\n");
  try {
    parse_dataset(in, DatasetFormat::kCsv, LabelSet({"positive", "negative"}), "d");
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find("(line 4)"), std::string::npos) << e.what();
  }
}

TEST(Dataset, MissingFile) {
  EXPECT_THROW(load_dataset("/nonexistent/file.jsonl", DatasetFormat::kJsonl,
                            LabelSet({"a", "b"}), "d"),
               DatasetError);
}

TEST(Input, RenderKeepsSpans) {
  auto in = render_input({"Classify:", " "}, "nice film");
  EXPECT_EQ(in.full_text, "Classify: nice film");
  EXPECT_EQ(in.prompt(), "Classify:");
  EXPECT_EQ(in.example(), "nice film");
}

TEST(Input, TokenizeKeepsBoundary) {
  auto in = render_input({"Rate it:", "\n"}, "  so good.");
  auto it = tokenize_input(in);
  EXPECT_EQ(it.example_begin, 3u);
  EXPECT_EQ(it.text[3].surface, "so");
  EXPECT_EQ(it.text.source, in.full_text);
  EXPECT_EQ(it.text.word_count(it.example_begin), 2u);
}

}  // namespace
}  // namespace ritfis
