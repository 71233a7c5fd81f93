// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/textpipe.hpp"

#include <algorithm>
#include <string_view>

#include "amity/error.hpp"

namespace amity::textpipe {
namespace {

constexpr std::string_view kEdgePunctuation = ".,!?;:'\"()[]";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::string_view word = text.substr(i, j - i);
    const auto first = word.find_first_not_of(kEdgePunctuation);
    if (first != std::string_view::npos) {
      const auto last = word.find_last_not_of(kEdgePunctuation);
      std::string token(word.substr(first, last - first + 1));
      std::transform(token.begin(), token.end(), token.begin(), ascii_lower);
      tokens.push_back(std::move(token));
    }
    i = j;
  }
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t max_len)
    : tokens_(std::move(tokens)), max_len_(max_len) {
  if (max_len_ < 1) fail(ErrorCode::SchemaError, "vocabulary max_len must be >= 1");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) fail(ErrorCode::SchemaError, "vocabulary contains an empty token");
    const bool inserted =
        index_.emplace(tokens_[i], static_cast<TokenId>(i) + kFirstTokenId).second;
    if (!inserted) {
      fail(ErrorCode::SchemaError, "vocabulary contains duplicate token '" + tokens_[i] + "'");
    }
  }
}

TokenId Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOovId : it->second;
}

Vocabulary fit_vocabulary(std::span<const std::string> texts) {
  struct Entry {
    std::string token;
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string, std::size_t> slot;
  std::size_t max_len = 0;
  for (const auto& text : texts) {
    auto tokens = tokenize(text);
    max_len = std::max(max_len, tokens.size());
    for (auto& token : tokens) {
      auto [it, inserted] = slot.emplace(token, entries.size());
      if (inserted) entries.push_back({std::move(token), 0, entries.size()});
      ++entries[it->second].count;
    }
  }
  if (entries.empty()) fail(ErrorCode::EmptyCorpus, "no tokens to build a vocabulary from");

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first_seen < b.first_seen;
  });
  std::vector<std::string> ordered;
  ordered.reserve(entries.size());
  for (auto& e : entries) ordered.push_back(std::move(e.token));
  return Vocabulary(std::move(ordered), max_len);
}

Vocabulary fit_vocabulary(std::span<const corpus::LabeledSample> samples) {
  std::vector<std::string> texts;
  texts.reserve(samples.size());
  for (const auto& s : samples) texts.push_back(s.text);
  return fit_vocabulary(std::span<const std::string>(texts));
}

std::vector<TokenId> encode(const Vocabulary& vocab, std::string_view text) {
  std::vector<TokenId> ids;
  for (const auto& token : tokenize(text)) ids.push_back(vocab.index_of(token));
  return ids;
}

PaddedSequence pad(std::span<const TokenId> ids, std::size_t max_len) {
  if (max_len < 1) fail(ErrorCode::ShapeMismatch, "pad: max_len must be >= 1");
  PaddedSequence out;
  out.true_len = std::min(ids.size(), max_len);
  out.ids.assign(max_len, kPadId);
  std::copy_n(ids.begin(), out.true_len, out.ids.begin());
  return out;
}

std::vector<PaddedSequence> encode_batch(const Vocabulary& vocab,
                                         std::span<const std::string> texts) {
  std::vector<PaddedSequence> batch;
  batch.reserve(texts.size());
  for (const auto& text : texts) {
    const auto ids = encode(vocab, text);
    batch.push_back(pad(ids, vocab.max_len()));
  }
  return batch;
}

}  // namespace amity::textpipe
