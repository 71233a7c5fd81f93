// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "amity/constellation.hpp"
#include "amity/dazai.hpp"
#include "amity/event_log.hpp"
#include "amity/random.hpp"

namespace amity::store {

struct UserRecord {
  std::string email;
  std::string name;
  std::string password_hash;
  std::int64_t created_at = 0;

  bool operator==(const UserRecord&) const = default;
};

struct SuggestionPlan {
  std::string topic;
  std::vector<std::string> diet;
  std::vector<std::string> exercise;

  bool operator==(const SuggestionPlan&) const = default;
};

struct DoctorProfile {
  std::string name;
  std::string description;
  std::string timings;
  std::string address;
  std::string contact_number;

  bool operator==(const DoctorProfile&) const = default;
};

struct Content {
  std::vector<SuggestionPlan> suggestions;
  std::vector<DoctorProfile> doctors;

  bool operator==(const Content&) const = default;
};

// Parses and validates the operator content file
// {"suggestions":[{"topic","diet","exercise"}],"doctors":[{five fields}]}.
// Throws ParseError / SchemaError.
Content parse_content(std::string_view json_text);
nlohmann::json content_to_json(const Content& content);

/// Left fold of the event log.
struct StoreState {
  std::map<std::string, UserRecord, std::less<>> users;
  constellation::GroupDirectory groups;
  std::map<std::string, dazai::ChatSession, std::less<>> sessions;
  // Session ids per user in start order; the last one is the active session.
  std::map<std::string, std::vector<std::string>, std::less<>> sessions_by_user;
  Content content;
  std::uint64_t last_seq = 0;

  // Folds one record in; throws CorruptLog when the record cannot follow the
  // current state.
  void apply(const EventRecord& record);

  // Canonical serialization; identical logs give identical strings.
  std::string canonical_json() const;
};

struct StoreOptions {
  bool sync = true;
  std::function<void(const std::string&)> on_warning;
  // Seed for generated group and session ids; 0 draws from the OS.
  std::uint64_t id_seed = 0;
};

/// Event-sourced persistence for users, groups, messages, chat sessions and
/// curated content. Commands validate against current state, append durably,
/// then fold the event in; all of that happens under one writer lock, so the
/// event hook observes events in seq order. Reads take a shared lock.
class Store {
 public:
  using EventHook = std::function<void(const EventRecord&, const StoreState&)>;

  static std::unique_ptr<Store> open(const std::filesystem::path& dir, StoreOptions options = {});

  UserRecord register_user(std::string email, std::string name, std::string password_hash,
                           std::int64_t now_ms);
  constellation::Group create_group(std::string_view user, std::string_view name,
                                    std::int64_t now_ms);
  void join_group(std::string_view user, std::string_view group_id, std::int64_t now_ms);
  void exit_group(std::string_view user, std::string_view group_id, std::int64_t now_ms);
  constellation::Message post_message(std::string_view user, std::string_view group_id,
                                      std::string_view body, std::int64_t now_ms);
  dazai::ChatSession start_session(std::string_view user, std::int64_t now_ms);
  // Appends the user turn and the bot turn back to back.
  void append_exchange(std::string_view session_id, const dazai::Turn& user_turn,
                       const dazai::Turn& bot_turn);
  void seed_content(const Content& content);

  std::optional<UserRecord> find_user(std::string_view email) const;
  UserRecord get_user(std::string_view email) const;  // NotFound
  constellation::Group get_group(std::string_view group_id) const;  // GroupNotFound
  std::vector<constellation::Message> messages(std::string_view group_id,
                                               std::uint64_t since_seq) const;
  dazai::ChatSession session(std::string_view session_id) const;  // NotFound
  std::optional<std::string> active_session(std::string_view user) const;
  Content content() const;
  std::uint64_t event_count() const;

  // Runs `f(const StoreState&)` under the shared lock.
  template <class F>
  auto read(F&& f) const {
    std::shared_lock lock(mutex_);
    return f(state_);
  }

  // Called after each event is applied, still under the writer lock.
  void set_event_hook(EventHook hook);

 private:
  Store() = default;

  std::uint64_t commit(EventKind kind, nlohmann::json payload);
  std::string fresh_id(char prefix, const std::function<bool(const std::string&)>& taken);

  mutable std::shared_mutex mutex_;
  std::unique_ptr<EventLog> log_;
  StoreState state_;
  EventHook hook_;
  Rng id_rng_;
};

}  // namespace amity::store
