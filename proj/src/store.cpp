// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/store.hpp"

#include <cstdio>
#include <random>
#include <set>

#include "amity/error.hpp"

namespace amity::store {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kTopics[] = {"anxiety", "depression", "hypertension"};

[[noreturn]] void content_error(const std::string& what) {
  fail(ErrorCode::SchemaError, "content schema error: " + what);
}

void only_keys(const json& node, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  for (const auto& [key, value] : node.items()) {
    bool known = false;
    for (auto k : allowed) known = known || key == k;
    if (!known) content_error(where + ": unknown key '" + key + "'");
  }
}

std::string required_string(const json& node, const char* field, const std::string& where) {
  if (!node.contains(field) || !node.at(field).is_string()) {
    content_error(where + ": field '" + field + "' must be a string");
  }
  auto s = node.at(field).get<std::string>();
  if (s.empty()) content_error(where + ": field '" + field + "' is empty");
  return s;
}

std::vector<std::string> required_list(const json& node, const char* field,
                                       const std::string& where) {
  if (!node.contains(field) || !node.at(field).is_array()) {
    content_error(where + ": field '" + field + "' must be an array");
  }
  std::vector<std::string> out;
  for (const auto& item : node.at(field)) {
    if (!item.is_string() || item.get<std::string>().empty()) {
      content_error(where + ": field '" + field + "' must hold non-empty strings");
    }
    out.push_back(item.get<std::string>());
  }
  if (out.empty()) content_error(where + ": field '" + field + "' is empty");
  return out;
}

Content content_from_json(const json& root) {
  if (!root.is_object()) content_error("top level must be an object");
  only_keys(root, {"suggestions", "doctors"}, "content");
  Content content;
  if (root.contains("suggestions")) {
    if (!root.at("suggestions").is_array()) content_error("'suggestions' must be an array");
    std::set<std::string> topics;
    for (const auto& node : root.at("suggestions")) {
      const std::string where = "suggestion #" + std::to_string(content.suggestions.size());
      if (!node.is_object()) content_error(where + ": must be an object");
      only_keys(node, {"topic", "diet", "exercise"}, where);
      SuggestionPlan plan{required_string(node, "topic", where), required_list(node, "diet", where),
                          required_list(node, "exercise", where)};
      bool known = false;
      for (auto t : kTopics) known = known || plan.topic == t;
      if (!known) content_error(where + ": unknown topic \"" + plan.topic + "\"");
      if (!topics.insert(plan.topic).second) {
        content_error(where + ": duplicate topic \"" + plan.topic + "\"");
      }
      content.suggestions.push_back(std::move(plan));
    }
  }
  if (root.contains("doctors")) {
    if (!root.at("doctors").is_array()) content_error("'doctors' must be an array");
    for (const auto& node : root.at("doctors")) {
      const std::string where = "doctor #" + std::to_string(content.doctors.size());
      if (!node.is_object()) content_error(where + ": must be an object");
      only_keys(node, {"name", "description", "timings", "address", "contact_number"}, where);
      content.doctors.push_back({required_string(node, "name", where),
                                 required_string(node, "description", where),
                                 required_string(node, "timings", where),
                                 required_string(node, "address", where),
                                 required_string(node, "contact_number", where)});
    }
  }
  return content;
}

json turn_to_json(const std::string& session_id, const dazai::Turn& t) {
  json j = {{"session_id", session_id},
            {"speaker", std::string(dazai::to_string(t.speaker))},
            {"text", t.text},
            {"timestamp", t.timestamp_ms}};
  if (t.tag) j["tag"] = *t.tag;
  if (t.confidence) j["confidence"] = *t.confidence;
  return j;
}

void check_turn(const dazai::ChatSession& s, const dazai::Turn& t) {
  if (!s.turns.empty() && t.timestamp_ms <= s.turns.back().timestamp_ms) {
    fail(ErrorCode::BadRequest, "turn timestamps must strictly increase");
  }
  if (t.speaker == dazai::Speaker::bot && (!t.tag || !t.confidence)) {
    fail(ErrorCode::BadRequest, "bot turns carry a tag and a confidence");
  }
}

}  // namespace

Content parse_content(std::string_view json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) fail(ErrorCode::ParseError, "content file is not valid JSON");
  return content_from_json(root);
}

json content_to_json(const Content& content) {
  json j = {{"suggestions", json::array()}, {"doctors", json::array()}};
  for (const auto& s : content.suggestions) {
    j["suggestions"].push_back({{"topic", s.topic}, {"diet", s.diet}, {"exercise", s.exercise}});
  }
  for (const auto& d : content.doctors) {
    j["doctors"].push_back({{"name", d.name},
                            {"description", d.description},
                            {"timings", d.timings},
                            {"address", d.address},
                            {"contact_number", d.contact_number}});
  }
  return j;
}

void StoreState::apply(const EventRecord& record) {
  if (record.seq != last_seq + 1) {
    fail(ErrorCode::CorruptLog, "event seq " + std::to_string(record.seq) + " does not follow " +
                                    std::to_string(last_seq));
  }
  const json& p = record.payload;
  try {
    switch (record.kind) {
      case EventKind::UserRegistered: {
        UserRecord u{p.at("email").get<std::string>(), p.at("name").get<std::string>(),
                     p.at("password_hash").get<std::string>(), p.at("created_at").get<std::int64_t>()};
        if (users.count(u.email) != 0) fail(ErrorCode::EmailTaken, "duplicate user " + u.email);
        auto email = u.email;
        users.emplace(std::move(email), std::move(u));
        break;
      }
      case EventKind::GroupCreated: {
        const auto name = p.at("name").get<std::string>();
        groups.check_create(name);
        groups.apply_create(p.at("group_id").get<std::string>(), name,
                            p.at("admin").get<std::string>(), p.at("created_at").get<std::int64_t>());
        break;
      }
      case EventKind::MemberJoined: {
        const auto gid = p.at("group_id").get<std::string>();
        const auto email = p.at("email").get<std::string>();
        groups.check_join(email, gid);
        groups.apply_join(gid, email);
        break;
      }
      case EventKind::MemberExited: {
        const auto gid = p.at("group_id").get<std::string>();
        const auto email = p.at("email").get<std::string>();
        groups.check_exit(email, gid);
        groups.apply_exit(gid, email);
        break;
      }
      case EventKind::MessagePosted: {
        const auto gid = p.at("group_id").get<std::string>();
        const auto sender = p.at("sender").get<std::string>();
        const auto body = p.at("body").get<std::string>();
        groups.check_post(sender, gid, body);
        const auto seq = p.at("seq").get<std::uint64_t>();
        if (seq != groups.last_seq(gid) + 1) {
          fail(ErrorCode::CorruptLog, "message seq " + std::to_string(seq) + " leaves a gap");
        }
        const auto& m = groups.apply_post(gid, sender, body, p.at("timestamp").get<std::int64_t>());
        if (m.message_id != p.at("message_id").get<std::string>()) {
          fail(ErrorCode::CorruptLog, "message id mismatch for " + m.message_id);
        }
        break;
      }
      case EventKind::SessionStarted: {
        auto id = p.at("session_id").get<std::string>();
        auto email = p.at("email").get<std::string>();
        if (sessions.count(id) != 0) fail(ErrorCode::CorruptLog, "duplicate session " + id);
        sessions_by_user[email].push_back(id);
        sessions.emplace(id, dazai::new_session(id, email));
        break;
      }
      case EventKind::SessionTurn: {
        const auto id = p.at("session_id").get<std::string>();
        auto it = sessions.find(id);
        if (it == sessions.end()) fail(ErrorCode::CorruptLog, "turn for unknown session " + id);
        auto speaker = dazai::parse_speaker(p.at("speaker").get<std::string>());
        if (!speaker) fail(ErrorCode::CorruptLog, "bad speaker in session " + id);
        dazai::Turn t{*speaker, p.at("text").get<std::string>(), std::nullopt, std::nullopt,
                      p.at("timestamp").get<std::int64_t>()};
        if (p.contains("tag")) t.tag = p.at("tag").get<std::string>();
        if (p.contains("confidence")) t.confidence = p.at("confidence").get<double>();
        check_turn(it->second, t);
        it->second.turns.push_back(std::move(t));
        break;
      }
      case EventKind::ContentSeeded:
        content = content_from_json(p);
        break;
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::CorruptLog, "event " + std::to_string(record.seq) + " (" +
                                    std::string(to_string(record.kind)) + "): " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptLog) throw;
    fail(ErrorCode::CorruptLog, "event " + std::to_string(record.seq) + " (" +
                                    std::string(to_string(record.kind)) + ") cannot apply: " + e.what());
  }
  last_seq = record.seq;
}

std::string StoreState::canonical_json() const {
  ordered_json root;
  root["last_seq"] = last_seq;
  auto& u = root["users"] = ordered_json::array();
  for (const auto& [email, user] : users) {
    u.push_back({{"email", user.email},
                 {"name", user.name},
                 {"password_hash", user.password_hash},
                 {"created_at", user.created_at}});
  }
  auto& g = root["groups"] = ordered_json::array();
  for (const auto& [id, group] : groups.groups()) {
    ordered_json node = {{"group_id", id},
                         {"name", group.name},
                         {"admin", group.admin},
                         {"members", group.members},
                         {"created_at", group.created_at}};
    auto& msgs = node["messages"] = ordered_json::array();
    for (const auto& m : groups.log(id)) {
      msgs.push_back({{"message_id", m.message_id},
                      {"sender", m.sender},
                      {"body", m.body},
                      {"seq", m.seq},
                      {"timestamp", m.timestamp}});
    }
    g.push_back(std::move(node));
  }
  auto& s = root["sessions"] = ordered_json::array();
  for (const auto& [id, session] : sessions) {
    ordered_json node = {{"session_id", id}, {"user", session.user}};
    auto& turns = node["turns"] = ordered_json::array();
    for (const auto& t : session.turns) {
      ordered_json turn = {{"speaker", std::string(dazai::to_string(t.speaker))},
                           {"text", t.text},
                           {"timestamp", t.timestamp_ms}};
      if (t.tag) turn["tag"] = *t.tag;
      if (t.confidence) turn["confidence"] = *t.confidence;
      turns.push_back(std::move(turn));
    }
    s.push_back(std::move(node));
  }
  root["content"] = content_to_json(content);
  return root.dump();
}

std::unique_ptr<Store> Store::open(const std::filesystem::path& dir, StoreOptions options) {
  std::unique_ptr<Store> store(new Store());
  LogOptions log_options{options.sync, options.on_warning};
  store->log_ = std::make_unique<EventLog>(EventLog::open(
      dir, log_options, [&](const EventRecord& r) { store->state_.apply(r); }));
  std::uint64_t seed = options.id_seed;
  if (seed == 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  store->id_rng_ = Rng(seed);
  return store;
}

std::uint64_t Store::commit(EventKind kind, json payload) {
  const EventRecord record{log_->last_seq() + 1, kind, std::move(payload)};
  log_->append(record.kind, record.payload);
  state_.apply(record);
  if (hook_) hook_(record, state_);
  return record.seq;
}

std::string Store::fresh_id(char prefix, const std::function<bool(const std::string&)>& taken) {
  for (;;) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%c%016llx", prefix,
                  static_cast<unsigned long long>(id_rng_.next_u64()));
    std::string id(buf);
    if (!taken(id)) return id;
  }
}

UserRecord Store::register_user(std::string email, std::string name, std::string password_hash,
                                std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  if (state_.users.count(email) != 0) fail(ErrorCode::EmailTaken, "email already registered");
  UserRecord user{std::move(email), std::move(name), std::move(password_hash), now_ms};
  commit(EventKind::UserRegistered, {{"email", user.email},
                                     {"name", user.name},
                                     {"password_hash", user.password_hash},
                                     {"created_at", user.created_at}});
  return user;
}

constellation::Group Store::create_group(std::string_view user, std::string_view name,
                                         std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  if (state_.users.count(user) == 0) fail(ErrorCode::NotFound, "unknown user");
  state_.groups.check_create(name);
  const std::string id =
      fresh_id('g', [&](const std::string& c) { return state_.groups.find(c) != nullptr; });
  commit(EventKind::GroupCreated,
         {{"group_id", id}, {"name", name}, {"admin", user}, {"created_at", now_ms}});
  return state_.groups.get(id);
}

void Store::join_group(std::string_view user, std::string_view group_id, std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  if (state_.users.count(user) == 0) fail(ErrorCode::NotFound, "unknown user");
  state_.groups.check_join(user, group_id);
  commit(EventKind::MemberJoined, {{"group_id", group_id}, {"email", user}, {"timestamp", now_ms}});
}

void Store::exit_group(std::string_view user, std::string_view group_id, std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  state_.groups.check_exit(user, group_id);
  commit(EventKind::MemberExited, {{"group_id", group_id}, {"email", user}, {"timestamp", now_ms}});
}

constellation::Message Store::post_message(std::string_view user, std::string_view group_id,
                                           std::string_view body, std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  state_.groups.check_post(user, group_id, body);
  const std::uint64_t seq = state_.groups.last_seq(group_id) + 1;
  commit(EventKind::MessagePosted, {{"group_id", group_id},
                                    {"message_id", std::string(group_id) + "-" + std::to_string(seq)},
                                    {"sender", user},
                                    {"body", body},
                                    {"seq", seq},
                                    {"timestamp", now_ms}});
  return state_.groups.log(group_id).back();
}

dazai::ChatSession Store::start_session(std::string_view user, std::int64_t now_ms) {
  std::unique_lock lock(mutex_);
  if (state_.users.count(user) == 0) fail(ErrorCode::NotFound, "unknown user");
  const std::string id =
      fresh_id('s', [&](const std::string& c) { return state_.sessions.count(c) != 0; });
  commit(EventKind::SessionStarted, {{"session_id", id}, {"email", user}, {"timestamp", now_ms}});
  return state_.sessions.find(id)->second;
}

void Store::append_exchange(std::string_view session_id, const dazai::Turn& user_turn,
                            const dazai::Turn& bot_turn) {
  std::unique_lock lock(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) fail(ErrorCode::NotFound, "unknown session");
  check_turn(it->second, user_turn);
  if (bot_turn.timestamp_ms <= user_turn.timestamp_ms) {
    fail(ErrorCode::BadRequest, "turn timestamps must strictly increase");
  }
  check_turn(dazai::ChatSession{}, bot_turn);
  const std::string id(session_id);
  commit(EventKind::SessionTurn, turn_to_json(id, user_turn));
  commit(EventKind::SessionTurn, turn_to_json(id, bot_turn));
}

void Store::seed_content(const Content& content) {
  json payload = content_to_json(content);
  content_from_json(payload);
  std::unique_lock lock(mutex_);
  commit(EventKind::ContentSeeded, std::move(payload));
}

std::optional<UserRecord> Store::find_user(std::string_view email) const {
  std::shared_lock lock(mutex_);
  auto it = state_.users.find(email);
  if (it == state_.users.end()) return std::nullopt;
  return it->second;
}

UserRecord Store::get_user(std::string_view email) const {
  auto user = find_user(email);
  if (!user) fail(ErrorCode::NotFound, "no user " + std::string(email));
  return *user;
}

constellation::Group Store::get_group(std::string_view group_id) const {
  std::shared_lock lock(mutex_);
  return state_.groups.get(group_id);
}

std::vector<constellation::Message> Store::messages(std::string_view group_id,
                                                    std::uint64_t since_seq) const {
  std::shared_lock lock(mutex_);
  const auto& log = state_.groups.log(group_id);
  const std::size_t from = std::min<std::uint64_t>(since_seq, log.size());
  return {log.begin() + static_cast<std::ptrdiff_t>(from), log.end()};
}

dazai::ChatSession Store::session(std::string_view session_id) const {
  std::shared_lock lock(mutex_);
  auto it = state_.sessions.find(session_id);
  if (it == state_.sessions.end()) fail(ErrorCode::NotFound, "no session " + std::string(session_id));
  return it->second;
}

std::optional<std::string> Store::active_session(std::string_view user) const {
  std::shared_lock lock(mutex_);
  auto it = state_.sessions_by_user.find(user);
  if (it == state_.sessions_by_user.end() || it->second.empty()) return std::nullopt;
  return it->second.back();
}

Content Store::content() const {
  std::shared_lock lock(mutex_);
  return state_.content;
}

std::uint64_t Store::event_count() const {
  std::shared_lock lock(mutex_);
  return state_.last_seq;
}

void Store::set_event_hook(EventHook hook) {
  std::unique_lock lock(mutex_);
  hook_ = std::move(hook);
}

}  // namespace amity::store
