// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/dazai.hpp"

#include <algorithm>

#include "amity/error.hpp"

namespace amity::dazai {

std::string_view to_string(Speaker s) noexcept { return s == Speaker::user ? "user" : "bot"; }

std::optional<Speaker> parse_speaker(std::string_view s) noexcept {
  if (s == "user") return Speaker::user;
  if (s == "bot") return Speaker::bot;
  return std::nullopt;
}

Classification classify(const nn::TrainedModel& model, std::string_view text) {
  const nn::Prediction p = nn::predict(model, text);
  return {p.tag_index, model.tags[p.tag_index], p.confidence};
}

BotReply compose_reply(const nn::TrainedModel& model, std::string_view text, Rng& rng,
                       double threshold) {
  BotReply reply;
  try {
    const Classification c = classify(model, text);
    reply.tag = c.tag;
    reply.confidence = c.confidence;
    const auto& pool = model.responses.at(c.tag_index);
    if (c.confidence >= threshold && !pool.empty()) {
      reply.reply = pool[rng.below(pool.size())];
      return reply;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AllPadding) throw;
  }
  reply.fallback = true;
  reply.reply = std::string(kFallbackReply);
  return reply;
}

std::pair<Turn, Turn> make_turns(const ChatSession& session, std::string_view text,
                                 const BotReply& reply, std::int64_t now_ms) {
  std::int64_t ts = now_ms;
  if (!session.turns.empty()) ts = std::max(ts, session.turns.back().timestamp_ms + 1);
  Turn user{Speaker::user, std::string(text), std::nullopt, std::nullopt, ts};
  Turn bot{Speaker::bot, reply.reply, reply.tag, reply.confidence, ts + 1};
  return {std::move(user), std::move(bot)};
}

ChatSession new_session(std::string session_id, std::string user) {
  return {std::move(session_id), std::move(user), {}};
}

const nn::TrainedModel& Chatbot::model() const {
  if (!model_) fail(ErrorCode::ModelUnavailable, "no chatbot model is loaded");
  return *model_;
}

BotReply Chatbot::respond(ChatSession& session, std::string_view text, Rng& rng,
                          std::int64_t now_ms) const {
  BotReply reply = compose_reply(model(), text, rng, threshold_);
  auto [user, bot] = make_turns(session, text, reply, now_ms);
  session.turns.push_back(std::move(user));
  session.turns.push_back(std::move(bot));
  return reply;
}

}  // namespace amity::dazai
