// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "amity/error.hpp"

namespace amity::nn {

std::string EvalReport::overall_line() const {
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.1f", 100.0 * accuracy);
  return std::to_string(correct) + "/" + std::to_string(total) + " (" + pct + "%)";
}

std::string EvalReport::per_tag_table() const {
  std::size_t width = 3;
  for (const auto& s : per_tag) width = std::max(width, s.tag.size());
  std::ostringstream out;
  out << "tag" << std::string(width - 3, ' ') << "  score\n";
  for (const auto& s : per_tag) {
    out << s.tag << std::string(width - s.tag.size(), ' ') << "  " << s.correct << '/'
        << s.total << '\n';
  }
  return out.str();
}

std::vector<EvalItem> parse_evalset(std::istream& in) {
  std::vector<EvalItem> items;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      fail(ErrorCode::ParseError,
           "evalset line " + std::to_string(number) + ": expected <utterance>\\t<tag>");
    }
    items.push_back({line.substr(0, tab), line.substr(tab + 1), number});
  }
  return items;
}

EvalReport evaluate(const TrainedModel& model, std::span<const EvalItem> items) {
  if (items.empty()) fail(ErrorCode::EmptyEvalSet, "evalset has no items");

  const std::size_t T = model.num_tags();
  std::vector<std::size_t> expected(items.size());
  for (std::size_t k = 0; k < items.size(); ++k) {
    try {
      expected[k] = model.tag_index(items[k].expected_tag);
    } catch (const Error&) {
      const std::size_t line = items[k].line != 0 ? items[k].line : k + 1;
      fail(ErrorCode::UnknownTag, "evalset line " + std::to_string(line) + ": unknown tag \"" +
                                      items[k].expected_tag + "\"");
    }
  }

  EvalReport report;
  report.total = items.size();
  report.confusion.assign(T, std::vector<std::size_t>(T, 0));
  std::vector<TagScore> scores(T);
  std::vector<bool> seen(T, false);
  for (std::size_t t = 0; t < T; ++t) scores[t].tag = model.tags[t];

  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::size_t want = expected[k];
    seen[want] = true;
    ++scores[want].total;
    try {
      const Prediction p = predict(model, items[k].utterance);
      ++report.confusion[want][p.tag_index];
      if (p.tag_index == want) {
        ++scores[want].correct;
        ++report.correct;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AllPadding) throw;
    }
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (seen[t]) report.per_tag.push_back(scores[t]);
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

}  // namespace amity::nn
