// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"

#include "amity/dazai.hpp"
#include "amity/error.hpp"
#include "amity/gateway/auth.hpp"
#include "amity/neuralnet.hpp"
#include "amity/random.hpp"
#include "amity/store.hpp"

namespace amity::gateway {

int http_status(ErrorCode code) noexcept;
nlohmann::json error_body(ErrorCode code, std::string_view message);

struct GatewayConfig {
  PasswordHasher::Params password = PasswordHasher::interactive();
  std::chrono::seconds token_ttl{24 * 3600};
  double threshold = dazai::kDefaultThreshold;
  std::uint64_t reply_seed = 0;  // 0 draws from the OS
  // Client frames accepted per WebSocket connection before it is closed.
  std::size_t max_ws_frames = 10000;
  std::size_t max_body_bytes = 64 * 1024;
  Clock clock;  // defaults to the system clock
};

struct ApiRequest {
  std::string method;
  std::string target;  // path plus optional query string
  std::string authorization;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;  // null means no body
};

/// Receives pushed group frames. deliver() runs under the store's writer
/// lock and must not block.
class Subscriber {
 public:
  virtual ~Subscriber() = default;
  virtual void deliver(std::shared_ptr<const std::string> frame) = 0;
};

/// Group fan-out. Fed by the store's event hook, so frames go out in the
/// order events were committed.
class Hub {
 public:
  // Registers `sub` for `group_id`; returns the group's last seq at that
  // moment. Throws SubscribeRefused unless `user` is a member.
  std::uint64_t subscribe(const store::Store& store, const std::string& user,
                          const std::string& group_id, const std::shared_ptr<Subscriber>& sub);
  void unsubscribe(const std::string& group_id, const Subscriber* sub);
  void drop(const Subscriber* sub);

  void on_event(const store::EventRecord& record, const store::StoreState& state);
  std::size_t subscription_count() const;

 private:
  struct Entry {
    std::string user;
    std::weak_ptr<Subscriber> sub;
  };
  mutable std::mutex mutex_;
  std::map<std::string, std::map<const Subscriber*, Entry>> groups_;
};

nlohmann::json group_message_frame(const constellation::Message& m);

/// HTTP API over the store and chatbot, independent of the transport.
class Gateway {
 public:
  Gateway(store::Store& store, std::shared_ptr<const nn::TrainedModel> model,
          GatewayConfig config = {});
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  ApiResponse handle(const ApiRequest& request);

  std::string register_user(std::string_view email, std::string_view name,
                            std::string_view password);
  std::string login(std::string_view email, std::string_view password);
  void logout(std::string_view token);
  // Email bound to the token; throws Unauthorized.
  std::string authenticate(std::string_view token);
  dazai::BotReply chat(const std::string& user, std::string_view text);

  Hub& hub() noexcept { return hub_; }
  store::Store& store() noexcept { return store_; }
  const GatewayConfig& config() const noexcept { return config_; }
  std::int64_t now_ms() const;

 private:
  ApiResponse route(const ApiRequest& request, const std::string& path,
                    const std::map<std::string, std::string>& query);

  store::Store& store_;
  dazai::Chatbot chatbot_;
  GatewayConfig config_;
  PasswordHasher hasher_;
  TokenTable tokens_;
  Hub hub_;
  std::mutex rng_mutex_;
  Rng rng_;
  // Chat calls for one user (hence one active session) run one at a time.
  std::array<std::mutex, 64> chat_locks_;
};

// "%XX" and '+' decoding for query values.
std::string url_decode(std::string_view s);
std::map<std::string, std::string> parse_query(std::string_view query);
// "Bearer <token>" -> token; empty when the header has another shape.
std::string bearer_token(std::string_view header);

}  // namespace amity::gateway
