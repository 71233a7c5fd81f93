// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "amity/error.hpp"
#include "amity/textpipe.hpp"
#include "json.hpp"

namespace amity::corpus {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) {
  fail(ErrorCode::SchemaError, "corpus schema error: " + what);
}

std::string intent_label(std::size_t index, const std::string& tag) {
  std::string label = "intent #" + std::to_string(index);
  if (!tag.empty()) label += " (\"" + tag + "\")";
  return label;
}

std::vector<std::string> string_list(const json& node, const std::string& field,
                                     const std::string& where) {
  if (!node.is_array()) schema_error(where + ": field '" + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(node.size());
  for (const auto& item : node) {
    if (!item.is_string()) {
      schema_error(where + ": field '" + field + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

// nlohmann reports a byte offset; translate it into line:column for humans.
std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::question: return "question";
    case Category::greeting: return "greeting";
    case Category::descriptive: return "descriptive";
  }
  return "descriptive";
}

std::optional<Category> parse_category(std::string_view s) noexcept {
  if (s == "question") return Category::question;
  if (s == "greeting") return Category::greeting;
  if (s == "descriptive") return Category::descriptive;
  return std::nullopt;
}

std::optional<std::size_t> IntentCorpus::find_tag(std::string_view tag) const noexcept {
  for (std::size_t i = 0; i < intents.size(); ++i) {
    if (intents[i].tag == tag) return i;
  }
  return std::nullopt;
}

void validate(const IntentCorpus& corpus) {
  if (corpus.version != kFormatVersion) {
    schema_error("unsupported version \"" + corpus.version + "\"");
  }
  if (corpus.intents.size() < 2) {
    schema_error("a corpus needs at least 2 intents, found " +
                 std::to_string(corpus.intents.size()));
  }
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < corpus.intents.size(); ++i) {
    const Intent& intent = corpus.intents[i];
    const std::string where = intent_label(i, intent.tag);
    if (intent.tag.empty()) schema_error(where + ": field 'tag' is empty");
    if (!seen.insert(intent.tag).second) {
      schema_error(where + ": duplicate tag \"" + intent.tag + "\"");
    }
    if (intent.patterns.empty()) schema_error(where + ": field 'patterns' is empty");
    if (intent.responses.empty()) schema_error(where + ": field 'responses' is empty");
    for (const auto& p : intent.patterns) {
      if (p.empty()) schema_error(where + ": field 'patterns' has an empty string");
    }
    for (const auto& r : intent.responses) {
      if (r.empty()) schema_error(where + ": field 'responses' has an empty string");
    }
  }
}

IntentCorpus parse_corpus(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError,
         "corpus parse error at " + position_of(json_text, e.byte) + ": " + e.what());
  }
  if (!root.is_object()) schema_error("top level must be an object");

  IntentCorpus corpus;
  for (const auto& [key, value] : root.items()) {
    if (key == "version") {
      if (!value.is_string()) schema_error("field 'version' must be a string");
      corpus.version = value.get<std::string>();
    } else if (key != "intents") {
      schema_error("unknown top-level key '" + key + "'");
    }
  }
  if (!root.contains("intents")) schema_error("missing field 'intents'");
  const json& intents = root.at("intents");
  if (!intents.is_array()) schema_error("field 'intents' must be an array");

  std::size_t index = 0;
  for (const auto& node : intents) {
    Intent intent;
    std::string where = intent_label(index, "");
    if (!node.is_object()) schema_error(where + ": must be an object");
    if (node.contains("tag") && node.at("tag").is_string()) {
      intent.tag = node.at("tag").get<std::string>();
      where = intent_label(index, intent.tag);
    }
    for (const auto& [key, value] : node.items()) {
      if (key == "tag") {
        if (!value.is_string()) schema_error(where + ": field 'tag' must be a string");
      } else if (key == "patterns") {
        intent.patterns = string_list(value, key, where);
      } else if (key == "responses") {
        intent.responses = string_list(value, key, where);
      } else if (key == "category") {
        if (!value.is_string()) schema_error(where + ": field 'category' must be a string");
        auto category = parse_category(value.get<std::string>());
        if (!category) {
          schema_error(where + ": unknown category \"" + value.get<std::string>() + "\"");
        }
        intent.category = *category;
      } else {
        schema_error(where + ": unknown key '" + key + "'");
      }
    }
    for (const char* required : {"tag", "patterns", "responses"}) {
      if (!node.contains(required)) {
        schema_error(where + ": missing field '" + required + "'");
      }
    }
    corpus.intents.push_back(std::move(intent));
    ++index;
  }
  validate(corpus);
  return corpus;
}

IntentCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open corpus file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str());
}

std::string corpus_to_json(const IntentCorpus& corpus) {
  nlohmann::ordered_json root;
  root["version"] = corpus.version;
  auto& intents = root["intents"] = nlohmann::ordered_json::array();
  for (const auto& intent : corpus.intents) {
    nlohmann::ordered_json node;
    node["tag"] = intent.tag;
    node["category"] = std::string(to_string(intent.category));
    node["patterns"] = intent.patterns;
    node["responses"] = intent.responses;
    intents.push_back(std::move(node));
  }
  return root.dump();
}

void serialize_corpus(const IntentCorpus& corpus, const std::filesystem::path& path) {
  validate(corpus);
  const std::string text = corpus_to_json(corpus);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write corpus file " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorCode::IoError, "short write to corpus file " + path.string());
}

std::vector<LabeledSample> explode_patterns(const IntentCorpus& corpus) {
  std::vector<LabeledSample> samples;
  for (std::size_t t = 0; t < corpus.intents.size(); ++t) {
    for (const auto& pattern : corpus.intents[t].patterns) {
      samples.push_back({pattern, t});
    }
  }
  return samples;
}

CorpusStats corpus_stats(const IntentCorpus& corpus) {
  CorpusStats stats;
  stats.tags = corpus.intents.size();
  for (const auto& intent : corpus.intents) {
    switch (intent.category) {
      case Category::question: ++stats.question; break;
      case Category::greeting: ++stats.greeting; break;
      case Category::descriptive: ++stats.descriptive; break;
    }
    stats.pattern_count += intent.patterns.size();
    stats.response_count += intent.responses.size();
    for (const auto& p : intent.patterns) {
      stats.max_pattern_tokens = std::max(stats.max_pattern_tokens, textpipe::tokenize(p).size());
    }
  }
  return stats;
}

}  // namespace amity::corpus
