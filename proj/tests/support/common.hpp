// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amity/corpus.hpp"
#include "amity/neuralnet.hpp"
#include "amity/random.hpp"

namespace amity::testing {

using nn::Matrix;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(AMITY_DATA_DIR) / name;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("amity-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline nn::ModelConfig tiny_config(std::size_t vocab, std::size_t emb, std::size_t lstm,
                                   std::size_t dense, std::size_t tags) {
  nn::ModelConfig c;
  c.vocab_size = vocab;
  c.embedding_dim = emb;
  c.lstm_units = lstm;
  c.dense_units = dense;
  c.num_tags = tags;
  return c;
}

// Every entry drawn from [-scale, scale], including biases and layer-norm
// vectors, so no term of the network is trivially zero. The padding row
// stays zero.
inline nn::ModelParams random_params(const nn::ModelConfig& cfg, std::uint64_t seed,
                                     double scale = 0.5) {
  nn::ModelParams p = nn::ModelParams::zeros(cfg);
  Rng rng(seed);
  p.for_each_tensor([&](std::string_view, Matrix& m) {
    for (double& v : m.values()) v = rng.uniform(-scale, scale);
  });
  for (double& v : p.ln_gain.values()) v += 1.0;
  for (double& v : p.embedding.row(0)) v = 0.0;
  return p;
}

inline std::vector<nn::PaddedSequence> random_batch(const nn::ModelConfig& cfg, std::size_t batch,
                                                   std::size_t max_len, Rng& rng) {
  std::vector<nn::PaddedSequence> out;
  const std::size_t rows = cfg.embedding_rows();
  for (std::size_t b = 0; b < batch; ++b) {
    nn::PaddedSequence s;
    s.true_len = 1 + rng.below(max_len);
    s.ids.assign(max_len, 0);
    for (std::size_t t = 0; t < s.true_len; ++t) {
      s.ids[t] = static_cast<textpipe::TokenId>(1 + rng.below(rows - 1));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline const corpus::IntentCorpus& bundled_corpus() {
  static const corpus::IntentCorpus c = corpus::load_corpus(data_path("corpus.json"));
  return c;
}

// Bundled corpus, default config, 25 epochs, seed 7; trained once per process.
inline const nn::TrainResult& bundled_training() {
  static const nn::TrainResult r = [] {
    nn::TrainConfig tc;
    tc.seed = 7;
    return nn::train(bundled_corpus(), nn::ModelConfig{}, tc);
  }();
  return r;
}

}  // namespace amity::testing
