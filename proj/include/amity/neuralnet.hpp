// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amity/corpus.hpp"
#include "amity/random.hpp"
#include "amity/tensor.hpp"
#include "amity/textpipe.hpp"

namespace amity::nn {

using textpipe::PaddedSequence;

struct ModelConfig {
  std::size_t vocab_size = 1;
  std::size_t embedding_dim = 100;
  std::size_t lstm_units = 32;
  std::size_t dense_units = 128;
  std::size_t num_tags = 2;
  double dropout_rate = 0.5;
  double layer_norm_epsilon = 1e-5;

  // Embedding rows: padding + OOV + one per real token.
  std::size_t embedding_rows() const noexcept { return vocab_size + 2; }

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Every trainable tensor of the embedding -> LSTM -> layer norm -> dense ->
/// softmax stack. Gate weights are stored input-major (x * W), biases and
/// layer-norm vectors as 1 x n matrices. The same struct doubles as the
/// gradient container.
struct ModelParams {
  ModelConfig config;

  Matrix embedding;  // (vocab_size + 2) x embedding_dim, row 0 frozen at zero

  Matrix w_input, w_forget, w_cell, w_output;  // embedding_dim x lstm_units
  Matrix u_input, u_forget, u_cell, u_output;  // lstm_units x lstm_units
  Matrix b_input, b_forget, b_cell, b_output;  // 1 x lstm_units

  Matrix ln_gain, ln_shift;  // 1 x lstm_units

  Matrix dense_w, dense_b;  // lstm_units x dense_units, 1 x dense_units
  Matrix out_w, out_b;      // dense_units x num_tags, 1 x num_tags

  static ModelParams zeros(const ModelConfig& config);

  struct TensorSlot {
    std::string_view name;
    Matrix ModelParams::*member;
  };
  // Declared tensor order; the model artifact stores weights in this order.
  static const std::array<TensorSlot, 19>& tensor_order();

  template <class F>
  void for_each_tensor(F&& f) {
    for (const auto& slot : tensor_order()) f(slot.name, this->*slot.member);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    for (const auto& slot : tensor_order()) f(slot.name, this->*slot.member);
  }

  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

struct TrainConfig {
  std::size_t epochs = 25;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

enum class Mode { train, infer };

ModelParams init_model(const ModelConfig& config, std::uint64_t seed);

// Normalizes `x` over its features (population variance), writes the
// normalized values and gain * n + shift; returns 1 / sqrt(var + epsilon).
double layer_norm(std::span<const double> x, std::span<const double> gain,
                  std::span<const double> shift, double epsilon, std::span<double> normalized,
                  std::span<double> out);

// Inverted-dropout multipliers for the dense layer, batch x dense_units:
// each entry is 0 with probability `dropout_rate`, otherwise 1/(1-rate).
Matrix sample_dropout_mask(const ModelConfig& config, std::size_t batch, Rng& rng);

// Batch x num_tags softmax probabilities. Train mode draws a dropout mask from
// `rng`; infer mode ignores it. Throws AllPadding for an empty sequence and
// ShapeMismatch for ids outside the embedding table.
Matrix forward(const ModelParams& params, std::span<const PaddedSequence> batch, Mode mode,
               Rng* rng = nullptr);

// Forward with an explicit dropout mask (nullptr = inference).
Matrix forward_with_mask(const ModelParams& params, std::span<const PaddedSequence> batch,
                         const Matrix* dropout_mask);

// Mean categorical cross-entropy with probabilities clamped to >= 1e-12.
double loss(const Matrix& probabilities, std::span<const std::size_t> labels);

struct BackwardResult {
  double loss = 0.0;
  Matrix probabilities;
  ModelParams gradients;
};

// Exact gradients of the mean cross-entropy by backpropagation through time.
// The gradient row of the padding embedding is always zero.
BackwardResult backward(const ModelParams& params, std::span<const PaddedSequence> batch,
                        std::span<const std::size_t> labels, const Matrix* dropout_mask);

struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::uint64_t step = 0;

  static AdamState for_params(const ModelParams& params);
};

// One bias-corrected Adam step. Throws NonFiniteGradient before touching
// anything when a gradient entry is NaN or infinite.
void apply_update(ModelParams& params, const ModelParams& gradients, AdamState& state,
                  const TrainConfig& config);

struct TrainedModel {
  ModelParams params;
  textpipe::Vocabulary vocab;
  std::vector<std::string> tags;
  // Response pool per tag, parallel to `tags`.
  std::vector<std::vector<std::string>> responses;

  std::size_t num_tags() const noexcept { return tags.size(); }
  std::size_t tag_index(std::string_view tag) const;  // throws UnknownTag
  bool operator==(const TrainedModel&) const = default;
};

struct EpochStats {
  double loss = 0.0;      // sample-weighted mean training loss (dropout on)
  double accuracy = 0.0;  // training-set accuracy in inference mode after the epoch

  bool operator==(const EpochStats&) const = default;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochStats> history;
};

// Explodes patterns, fits the vocabulary, then runs seeded mini-batch Adam.
// `model_config` supplies layer sizes; vocab_size and num_tags are taken
// from the corpus.
TrainResult train(const corpus::IntentCorpus& corpus, ModelConfig model_config,
                  const TrainConfig& train_config);

struct Prediction {
  std::size_t tag_index = 0;
  double confidence = 0.0;
  std::vector<double> probabilities;
};

// Inference on one utterance; ties resolve to the lowest tag index.
Prediction predict(const TrainedModel& model, std::string_view text);

std::size_t argmax(std::span<const double> row) noexcept;

// Fraction of the corpus patterns whose argmax tag matches their own tag.
double training_accuracy(const TrainedModel& model, const corpus::IntentCorpus& corpus);

}  // namespace amity::nn
