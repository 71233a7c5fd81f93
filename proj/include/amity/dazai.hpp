// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amity/neuralnet.hpp"
#include "amity/random.hpp"

namespace amity::dazai {

inline constexpr double kDefaultThreshold = 0.40;
inline constexpr std::string_view kFallbackReply =
    "I'm not sure I understood. Could you tell me more about how you're feeling?";

enum class Speaker { user, bot };

std::string_view to_string(Speaker s) noexcept;
std::optional<Speaker> parse_speaker(std::string_view s) noexcept;

struct Turn {
  Speaker speaker = Speaker::user;
  std::string text;
  std::optional<std::string> tag;
  std::optional<double> confidence;
  std::int64_t timestamp_ms = 0;

  bool operator==(const Turn&) const = default;
};

struct ChatSession {
  std::string session_id;
  std::string user;
  std::vector<Turn> turns;

  bool operator==(const ChatSession&) const = default;
};

struct BotReply {
  std::string tag;
  double confidence = 0.0;
  std::string reply;
  bool fallback = false;
};

struct Classification {
  std::size_t tag_index = 0;
  std::string tag;
  double confidence = 0.0;
};

// Argmax tag and its probability. Throws AllPadding when the utterance has
// no tokens.
Classification classify(const nn::TrainedModel& model, std::string_view text);

// Picks the reply for `text` without touching any session: a uniformly drawn
// response of the classified tag when confidence >= threshold, otherwise the
// fallback message. An utterance with no tokens is a fallback with empty tag
// and zero confidence.
BotReply compose_reply(const nn::TrainedModel& model, std::string_view text, Rng& rng,
                       double threshold = kDefaultThreshold);

// The user turn and bot turn for one exchange, stamped `now_ms` and
// `now_ms + 1` but never earlier than the session's last turn.
std::pair<Turn, Turn> make_turns(const ChatSession& session, std::string_view text,
                                 const BotReply& reply, std::int64_t now_ms);

ChatSession new_session(std::string session_id, std::string user);

/// Conversation front end over a shared immutable model. Holds no session
/// state of its own; callers own (and serialize access to) the sessions.
class Chatbot {
 public:
  explicit Chatbot(std::shared_ptr<const nn::TrainedModel> model,
                   double threshold = kDefaultThreshold)
      : model_(std::move(model)), threshold_(threshold) {}

  bool has_model() const noexcept { return model_ != nullptr; }
  const nn::TrainedModel& model() const;  // throws ModelUnavailable
  double threshold() const noexcept { return threshold_; }

  // Classifies, picks a reply and appends the user and bot turns.
  BotReply respond(ChatSession& session, std::string_view text, Rng& rng,
                   std::int64_t now_ms) const;

 private:
  std::shared_ptr<const nn::TrainedModel> model_;
  double threshold_;
};

}  // namespace amity::dazai
