// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "amity/corpus.hpp"
#include "amity/error.hpp"
#include "support/common.hpp"

using namespace amity;
using namespace amity::corpus;
using amity::testing::TempDir;
using amity::testing::write_text;

namespace {

ErrorCode parse_error_code(const std::string& text) {
  try {
    parse_corpus(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::IoError;
}

const char* kTwoIntents =
    R"({"version":"1","intents":[)"
    R"({"tag":"greeting","category":"greeting","patterns":["Hi","Hey"],)"
    R"("responses":["Hello there. Tell me how are you feeling today"]},)"
    R"({"tag":"morning","category":"greeting","patterns":["Good morning"],)"
    R"("responses":["Good morning."]}]})";

}  // namespace

TEST(Corpus, LoadsGreetingIntent) {
  TempDir dir;
  write_text(dir / "c.json", kTwoIntents);
  const auto c = load_corpus(dir / "c.json");
  ASSERT_EQ(c.intents.size(), 2u);
  EXPECT_EQ(c.intents[0].tag, "greeting");
  EXPECT_EQ(c.intents[0].patterns[0], "Hi");
  EXPECT_EQ(c.intents[0].responses[0], "Hello there. Tell me how are you feeling today");
  EXPECT_EQ(c.intents[0].category, Category::greeting);
  EXPECT_EQ(c.find_tag("morning"), 1u);
  EXPECT_FALSE(c.find_tag("night").has_value());
}

TEST(Corpus, MissingFile) {
  try {
    load_corpus("/nonexistent/corpus.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

TEST(Corpus, SchemaViolations) {
  EXPECT_EQ(parse_error_code(R"({"intents":[]})"), ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(
                R"({"intents":[{"tag":"morning","patterns":["a"],"responses":["b"]},)"
                R"({"tag":"morning","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"intents":[{"tag":"a","patterns":[],"responses":["b"]},)"
                             R"({"tag":"b","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"intents":[{"tag":"","patterns":["a"],"responses":["b"]},)"
                             R"({"tag":"b","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"intents":[{"tag":"a","patterns":[""],"responses":["b"]},)"
                             R"({"tag":"b","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"intents":[{"tag":"a","patterns":["x"],"responses":["b"],)"
                             R"("mood":"x"},{"tag":"b","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"extra":1,"intents":[]})"), ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"version":"2","intents":[]})"), ErrorCode::SchemaError);
  EXPECT_EQ(parse_error_code(R"({"intents":[{"tag":"a","category":"x","patterns":["x"],)"
                             R"("responses":["b"]},{"tag":"b","patterns":["c"],"responses":["d"]}]})"),
            ErrorCode::SchemaError);
}

TEST(Corpus, ParseErrorReportsPosition) {
  try {
    parse_corpus("{\n  \"intents\": [,]\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Corpus, CategoryDefaultsToDescriptive) {
  const auto c = parse_corpus(R"({"intents":[{"tag":"a","patterns":["x"],"responses":["b"]},)"
                              R"({"tag":"b","patterns":["c"],"responses":["d"]}]})");
  EXPECT_EQ(c.intents[0].category, Category::descriptive);
  EXPECT_EQ(c.version, "1");
}

TEST(Corpus, ExplodePatternsCountsAndOrder) {
  IntentCorpus c;
  c.intents = {{"A", {"a1", "a2"}, {"r"}, Category::descriptive},
               {"B", {"b1", "b2", "b3"}, {"r"}, Category::descriptive}};
  const auto s = explode_patterns(c);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0], (LabeledSample{"a1", 0}));
  EXPECT_EQ(s[1], (LabeledSample{"a2", 0}));
  EXPECT_EQ(s[2].tag_index, 1u);
  EXPECT_EQ(s[4].text, "b3");

  IntentCorpus one;
  one.intents = {{"only", {"p"}, {"r"}, Category::greeting}};
  const auto single = explode_patterns(one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].tag_index, 0u);
}

TEST(Corpus, BundledCorpusShape) {
  const auto& c = amity::testing::bundled_corpus();
  const auto s = explode_patterns(c);
  EXPECT_EQ(s.size(), 246u);
  const auto st = corpus_stats(c);
  EXPECT_EQ(st.tags, 72u);
  EXPECT_EQ(st.question, 30u);
  EXPECT_EQ(st.greeting, 10u);
  EXPECT_EQ(st.descriptive, 32u);
  EXPECT_EQ(st.pattern_count, s.size());
  for (const auto& sample : s) {
    ASSERT_LT(sample.tag_index, c.intents.size());
    std::size_t owners = 0;
    for (const auto& intent : c.intents) owners += intent.tag == c.intents[sample.tag_index].tag;
    EXPECT_EQ(owners, 1u);
  }
  // The reference greeting intents are present verbatim.
  const auto g = c.find_tag("greeting");
  ASSERT_TRUE(g);
  EXPECT_EQ(c.intents[*g].responses[0], "Hello there. Tell me how are you feeling today");
  const auto a = c.find_tag("afternoon");
  ASSERT_TRUE(a);
  EXPECT_EQ(c.intents[*a].patterns[0], "Good afternoon");
}

TEST(Corpus, StatsForSingleGreeting) {
  IntentCorpus c;
  c.intents = {{"hi", {"hello you there", "hi"}, {"r1", "r2"}, Category::greeting}};
  const auto st = corpus_stats(c);
  EXPECT_EQ(st.tags, 1u);
  EXPECT_EQ(st.greeting, 1u);
  EXPECT_EQ(st.question, 0u);
  EXPECT_EQ(st.descriptive, 0u);
  EXPECT_EQ(st.pattern_count, 2u);
  EXPECT_EQ(st.response_count, 2u);
  EXPECT_EQ(st.max_pattern_tokens, 3u);
}

TEST(Corpus, RoundTripBundled) {
  TempDir dir;
  const auto& c = amity::testing::bundled_corpus();
  serialize_corpus(c, dir / "out.json");
  EXPECT_EQ(load_corpus(dir / "out.json"), c);
}

TEST(Corpus, RoundTripUnicodeIsByteStable) {
  TempDir dir;
  IntentCorpus c;
  c.intents = {{"emoji", {"I feel 😢 today", "ça va?"}, {"💙 I'm here"}, Category::descriptive},
               {"plain", {"hello"}, {"hi"}, Category::greeting}};
  serialize_corpus(c, dir / "a.json");
  const auto once = load_corpus(dir / "a.json");
  EXPECT_EQ(once, c);
  serialize_corpus(once, dir / "b.json");
  EXPECT_EQ(amity::testing::read_text(dir / "a.json"), amity::testing::read_text(dir / "b.json"));
  EXPECT_EQ(once.intents[0].patterns, (std::vector<std::string>{"I feel 😢 today", "ça va?"}));
}

TEST(Corpus, SerializeRejectsInvalid) {
  TempDir dir;
  IntentCorpus c;
  c.intents = {{"a", {"x"}, {"y"}, Category::greeting}};
  EXPECT_THROW(serialize_corpus(c, dir / "x.json"), Error);
}
