// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "amity/corpus.hpp"

namespace amity::textpipe {

using TokenId = std::int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kOovId = 1;
inline constexpr TokenId kFirstTokenId = 2;

// Lowercases ASCII letters, splits on whitespace and strips the characters
// .,!?;:'"()[] from both ends of every token. Intra-word apostrophes survive.
std::vector<std::string> tokenize(std::string_view text);

/// Token to index map. Real tokens occupy indices 2..vocab_size+1 in
/// descending fit-corpus frequency (ties: first appearance); 0 is padding and
/// 1 is out-of-vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `tokens` in index order (tokens[0] gets index 2).
  Vocabulary(std::vector<std::string> tokens, std::size_t max_len);

  std::size_t vocab_size() const noexcept { return tokens_.size(); }
  std::size_t max_len() const noexcept { return max_len_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  TokenId index_of(std::string_view token) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && max_len_ == other.max_len_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_len_ = 1;
};

struct PaddedSequence {
  std::vector<TokenId> ids;
  std::size_t true_len = 0;

  bool operator==(const PaddedSequence&) const = default;
};

Vocabulary fit_vocabulary(std::span<const std::string> texts);
Vocabulary fit_vocabulary(std::span<const corpus::LabeledSample> samples);

std::vector<TokenId> encode(const Vocabulary& vocab, std::string_view text);

// Post-pads with zeros, truncating to the first `max_len` ids.
PaddedSequence pad(std::span<const TokenId> ids, std::size_t max_len);

std::vector<PaddedSequence> encode_batch(const Vocabulary& vocab,
                                         std::span<const std::string> texts);

}  // namespace amity::textpipe
