// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "amity/error.hpp"
#include "amity/evaluation.hpp"
#include "support/common.hpp"
#include "support/models.hpp"

using namespace amity;
using namespace amity::nn;

using amity::testing::synthetic_evalset;

TEST(LastTokenModel, PredictsLastToken) {
  const auto m = amity::testing::last_token_model();
  EXPECT_EQ(predict(m, "a").tag_index, 0u);
  EXPECT_EQ(predict(m, "a b").tag_index, 1u);
  EXPECT_EQ(predict(m, "b b c").tag_index, 2u);
  EXPECT_GT(predict(m, "c a").confidence, 0.99);
}

TEST(Evaluate, TwentyOfThirtyFormatsLikeTheReport) {
  const auto m = amity::testing::last_token_model();
  const auto items = synthetic_evalset(7, 6, 7);
  const auto r = evaluate(m, items);
  EXPECT_EQ(r.correct, 20u);
  EXPECT_EQ(r.total, 30u);
  EXPECT_NEAR(r.accuracy, 0.6667, 1e-4);
  EXPECT_EQ(r.overall_line(), "20/30 (66.7%)");
  ASSERT_EQ(r.per_tag.size(), 3u);
  EXPECT_EQ(r.per_tag[0].tag, "A");
  EXPECT_EQ(r.per_tag[0].correct, 7u);
  EXPECT_EQ(r.per_tag[0].total, 10u);
  EXPECT_EQ(r.per_tag[1].correct, 6u);
  const std::string table = r.per_tag_table();
  EXPECT_NE(table.find("A    7/10"), std::string::npos) << table;
  EXPECT_NE(table.find("B    6/10"), std::string::npos) << table;
  EXPECT_NE(table.find("C    7/10"), std::string::npos) << table;

  // Confusion rows: A's misses were predicted as B.
  EXPECT_EQ(r.confusion[0][0], 7u);
  EXPECT_EQ(r.confusion[0][1], 3u);
  std::size_t sum_diag = 0;
  for (std::size_t i = 0; i < 3; ++i) sum_diag += r.confusion[i][i];
  EXPECT_EQ(sum_diag, r.correct);
}

TEST(Evaluate, ScoresRangeZeroToTen) {
  const auto m = amity::testing::last_token_model();
  const auto r = evaluate(m, synthetic_evalset(10, 0, 3));
  EXPECT_EQ(r.per_tag[0].correct, 10u);
  EXPECT_EQ(r.per_tag[1].correct, 0u);
  EXPECT_EQ(r.overall_line(), "13/30 (43.3%)");
}

TEST(Evaluate, NoTokenUtteranceCountsAsWrong) {
  const auto m = amity::testing::last_token_model();
  const std::vector<EvalItem> items{{"?!", "A", 1}, {"a", "A", 2}};
  const auto r = evaluate(m, items);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_EQ(r.total, 2u);
}

TEST(Evaluate, EmptyAndUnknownTag) {
  const auto m = amity::testing::last_token_model();
  try {
    evaluate(m, std::vector<EvalItem>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyEvalSet);
  }
  try {
    evaluate(m, std::vector<EvalItem>{{"a", "A", 1}, {"b", "Z", 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownTag);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ParseEvalset, TabSeparatedWithLineNumbers) {
  std::istringstream in("hello there\tgreeting\n\nI feel sad\tsad\r\n");
  const auto items = parse_evalset(in);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].utterance, "hello there");
  EXPECT_EQ(items[0].expected_tag, "greeting");
  EXPECT_EQ(items[1].expected_tag, "sad");
  EXPECT_EQ(items[1].line, 3u);

  std::istringstream bad("no tab here\n");
  try {
    parse_evalset(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  std::istringstream empty("");
  EXPECT_TRUE(parse_evalset(empty).empty());
}

TEST(Evaluate, TrainedModelOnItsOwnPatterns) {
  const auto& c = amity::testing::bundled_corpus();
  const auto& m = amity::testing::bundled_training().model;
  std::vector<EvalItem> items;
  for (const auto& intent : c.intents) {
    for (const auto& p : intent.patterns) items.push_back({p, intent.tag, 0});
  }
  const auto r = evaluate(m, items);
  EXPECT_EQ(r.total, 246u);
  EXPECT_DOUBLE_EQ(r.accuracy, amity::testing::bundled_training().history.back().accuracy);
}

TEST(Evaluate, BundledEvalsetHasTenPerTopic) {
  std::ifstream in(amity::testing::data_path("evalset.tsv"));
  const auto items = parse_evalset(in);
  ASSERT_EQ(items.size(), 30u);
  const auto r = evaluate(amity::testing::bundled_training().model, items);
  ASSERT_EQ(r.per_tag.size(), 3u);
  for (const auto& t : r.per_tag) {
    EXPECT_EQ(t.total, 10u);
    EXPECT_LE(t.correct, 10u);
  }
}
