// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "amity/neuralnet.hpp"

namespace amity::nn {

inline constexpr std::string_view kModelFormat = "amity-model";
inline constexpr int kModelVersion = 1;

// Artifact layout: one line of JSON header
//   {"format":"amity-model","version":1,"config":{...},"tags":[...],
//    "responses":[[...]],"vocab":{"max_len":N,"tokens":[...]},
//    "tensors":[{"name":...,"rows":R,"cols":C},...]}
// then '\n', then every tensor as little-endian IEEE-754 doubles in
// ModelParams::tensor_order(), then a little-endian CRC-32 of all preceding
// bytes.
std::string encode_model(const TrainedModel& model);
TrainedModel decode_model(std::string_view bytes);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
// Throws FileNotFound/IoError, ChecksumMismatch (truncated or altered file),
// VersionMismatch (foreign format or version) and ShapeMismatch.
TrainedModel load_model(const std::filesystem::path& path);

// Replaces the response pools with the corpus' after checking that the corpus
// has exactly the model's tags in order; throws VersionMismatch otherwise.
void attach_corpus_responses(TrainedModel& model, const corpus::IntentCorpus& corpus);

}  // namespace amity::nn
