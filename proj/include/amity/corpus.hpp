// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace amity::corpus {

inline constexpr std::string_view kFormatVersion = "1";

enum class Category { question, greeting, descriptive };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s) noexcept;

/// One conversation topic: the classifier label plus its training utterances
/// and the pool of replies the bot picks from.
struct Intent {
  std::string tag;
  std::vector<std::string> patterns;
  std::vector<std::string> responses;
  Category category = Category::descriptive;

  bool operator==(const Intent&) const = default;
};

struct IntentCorpus {
  std::string version{kFormatVersion};
  std::vector<Intent> intents;

  std::size_t tag_count() const noexcept { return intents.size(); }
  /// Index of `tag` in corpus order, if present.
  std::optional<std::size_t> find_tag(std::string_view tag) const noexcept;

  bool operator==(const IntentCorpus&) const = default;
};

struct LabeledSample {
  std::string text;
  std::size_t tag_index = 0;

  bool operator==(const LabeledSample&) const = default;
};

struct CorpusStats {
  std::size_t tags = 0;
  std::size_t question = 0;
  std::size_t greeting = 0;
  std::size_t descriptive = 0;
  std::size_t pattern_count = 0;
  std::size_t response_count = 0;
  std::size_t max_pattern_tokens = 0;
};

// Throws Error{SchemaError} naming the offending intent and field.
void validate(const IntentCorpus& corpus);

// Parses and validates corpus JSON. Throws ParseError (with line/column) on
// malformed JSON and SchemaError on structural problems.
IntentCorpus parse_corpus(std::string_view json_text);
IntentCorpus load_corpus(const std::filesystem::path& path);

// Compact UTF-8 JSON in the on-disk key order (version, intents; per intent:
// tag, category, patterns, responses).
std::string corpus_to_json(const IntentCorpus& corpus);
void serialize_corpus(const IntentCorpus& corpus, const std::filesystem::path& path);

std::vector<LabeledSample> explode_patterns(const IntentCorpus& corpus);
CorpusStats corpus_stats(const IntentCorpus& corpus);

}  // namespace amity::corpus
