// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amity/checksum.hpp"
#include "amity/error.hpp"
#include "json.hpp"

namespace amity::nn {
namespace {

using nlohmann::ordered_json;

void put_f64_le(double v, std::string& out) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64_le(const char* in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

ordered_json config_to_json(const ModelConfig& c) {
  ordered_json j;
  j["vocab_size"] = c.vocab_size;
  j["embedding_dim"] = c.embedding_dim;
  j["lstm_units"] = c.lstm_units;
  j["dense_units"] = c.dense_units;
  j["num_tags"] = c.num_tags;
  j["dropout_rate"] = c.dropout_rate;
  j["layer_norm_epsilon"] = c.layer_norm_epsilon;
  return j;
}

ModelConfig config_from_json(const ordered_json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.lstm_units = j.at("lstm_units").get<std::size_t>();
  c.dense_units = j.at("dense_units").get<std::size_t>();
  c.num_tags = j.at("num_tags").get<std::size_t>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.layer_norm_epsilon = j.at("layer_norm_epsilon").get<double>();
  c.validate();
  return c;
}

}  // namespace

std::string encode_model(const TrainedModel& model) {
  ordered_json header;
  header["format"] = std::string(kModelFormat);
  header["version"] = kModelVersion;
  header["config"] = config_to_json(model.params.config);
  header["tags"] = model.tags;
  header["responses"] = model.responses;
  header["vocab"] = {{"max_len", model.vocab.max_len()}, {"tokens", model.vocab.tokens()}};
  auto& tensors = header["tensors"] = ordered_json::array();
  model.params.for_each_tensor([&](std::string_view name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });

  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + 8 * model.params.parameter_count() + 4);
  model.params.for_each_tensor([&](std::string_view, const Matrix& m) {
    for (double v : m.values()) put_f64_le(v, out);
  });
  char crc[4];
  put_u32_le(crc32(out), crc);
  out.append(crc, 4);
  return out;
}

TrainedModel decode_model(std::string_view bytes) {
  if (bytes.size() < 4) fail(ErrorCode::ChecksumMismatch, "model artifact is truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  if (crc32(body) != get_u32_le(bytes.data() + body.size())) {
    fail(ErrorCode::ChecksumMismatch, "model artifact checksum does not match");
  }
  const auto newline = body.find('\n');
  if (newline == std::string_view::npos) {
    fail(ErrorCode::VersionMismatch, "model artifact has no header line");
  }

  ordered_json header;
  try {
    header = ordered_json::parse(body.substr(0, newline));
  } catch (const ordered_json::parse_error&) {
    fail(ErrorCode::VersionMismatch, "model artifact header is not JSON");
  }
  if (!header.is_object() || header.value("format", std::string{}) != kModelFormat) {
    fail(ErrorCode::VersionMismatch, "not an amity-model artifact");
  }
  if (!header.contains("version") || header.at("version") != kModelVersion) {
    fail(ErrorCode::VersionMismatch, "unsupported model artifact version " +
                                         header.value("version", ordered_json()).dump());
  }

  TrainedModel model;
  try {
    model.params = ModelParams::zeros(config_from_json(header.at("config")));
    model.tags = header.at("tags").get<std::vector<std::string>>();
    model.responses = header.at("responses").get<std::vector<std::vector<std::string>>>();
    const auto& vocab = header.at("vocab");
    model.vocab = textpipe::Vocabulary(vocab.at("tokens").get<std::vector<std::string>>(),
                                       vocab.at("max_len").get<std::size_t>());
  } catch (const ordered_json::exception& e) {
    fail(ErrorCode::VersionMismatch, std::string("malformed model header: ") + e.what());
  }

  const auto& cfg = model.params.config;
  if (model.tags.size() != cfg.num_tags || model.responses.size() != cfg.num_tags ||
      model.vocab.vocab_size() != cfg.vocab_size) {
    fail(ErrorCode::ShapeMismatch, "model header disagrees with its own config");
  }
  const auto& declared = header.at("tensors");
  const auto& order = ModelParams::tensor_order();
  if (!declared.is_array() || declared.size() != order.size()) {
    fail(ErrorCode::ShapeMismatch, "model header declares the wrong tensor list");
  }

  const char* cursor = body.data() + newline + 1;
  const char* const end = body.data() + body.size();
  for (std::size_t k = 0; k < order.size(); ++k) {
    Matrix& m = model.params.*order[k].member;
    const auto& d = declared[k];
    if (d.value("name", std::string{}) != order[k].name ||
        d.value("rows", std::size_t{0}) != m.rows() || d.value("cols", std::size_t{0}) != m.cols()) {
      fail(ErrorCode::ShapeMismatch, "tensor " + std::string(order[k].name) +
                                         " does not match the configured shape");
    }
    if (static_cast<std::size_t>(end - cursor) < 8 * m.size()) {
      fail(ErrorCode::ShapeMismatch, "model artifact ends inside tensor " + std::string(order[k].name));
    }
    for (auto& v : m.values()) {
      v = get_f64_le(cursor);
      cursor += 8;
    }
  }
  if (cursor != end) fail(ErrorCode::ShapeMismatch, "trailing bytes after the last tensor");
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  const std::string bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write model artifact " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorCode::IoError, "short write to model artifact " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open model artifact " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::IoError, "cannot read model artifact " + path.string());
  return decode_model(buffer.str());
}

void attach_corpus_responses(TrainedModel& model, const corpus::IntentCorpus& corpus) {
  if (corpus.intents.size() != model.num_tags()) {
    fail(ErrorCode::VersionMismatch,
         "model has " + std::to_string(model.num_tags()) + " tags but the corpus has " +
             std::to_string(corpus.intents.size()));
  }
  for (std::size_t t = 0; t < model.num_tags(); ++t) {
    if (corpus.intents[t].tag != model.tags[t]) {
      fail(ErrorCode::VersionMismatch, "corpus tag \"" + corpus.intents[t].tag +
                                           "\" does not match model tag \"" + model.tags[t] + "\"");
    }
  }
  for (std::size_t t = 0; t < model.num_tags(); ++t) {
    model.responses[t] = corpus.intents[t].responses;
  }
}

}  // namespace amity::nn
