// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "amity/neuralnet.hpp"

namespace amity::nn {

struct EvalItem {
  std::string utterance;
  std::string expected_tag;
  std::size_t line = 0;  // 1-based source line, 0 when not read from a file
};

struct TagScore {
  std::string tag;
  std::size_t correct = 0;
  std::size_t total = 0;
};

struct EvalReport {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  // Tags that occur in the evalset, in model tag order.
  std::vector<TagScore> per_tag;
  // confusion[expected][predicted]; utterances with no tokens are counted as
  // wrong and left out of the matrix.
  std::vector<std::vector<std::size_t>> confusion;

  // "20/30 (66.7%)"
  std::string overall_line() const;
  // One row per tag: "<tag padded>  <correct>/<total>".
  std::string per_tag_table() const;
};

// Tab-separated `utterance<TAB>expected_tag` lines; blank lines are skipped.
// Throws ParseError naming the line for rows without a tab.
std::vector<EvalItem> parse_evalset(std::istream& in);

// Throws EmptyEvalSet for no items and UnknownTag (with line) for labels the
// model does not know.
EvalReport evaluate(const TrainedModel& model, std::span<const EvalItem> items);

}  // namespace amity::nn
