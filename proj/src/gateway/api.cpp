// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/gateway/api.hpp"

#include <charconv>
#include <functional>
#include <random>
#include <vector>

#include "amity/constellation.hpp"

namespace amity::gateway {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t os_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

const json& object_body(const ApiRequest& req, json& holder) {
  holder = json::parse(req.body.empty() ? std::string_view("{}") : std::string_view(req.body),
                       nullptr, false);
  if (holder.is_discarded() || !holder.is_object()) {
    fail(ErrorCode::BadRequest, "request body must be a JSON object");
  }
  return holder;
}

std::string string_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    fail(ErrorCode::BadRequest, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

ordered_json group_json(const constellation::Group& g) {
  return {{"group_id", g.group_id}, {"name", g.name},
          {"admin", g.admin},       {"members", g.members},
          {"member_count", g.members.size()}, {"created_at", g.created_at}};
}

ordered_json message_json(const constellation::Message& m) {
  return {{"message_id", m.message_id}, {"group_id", m.group_id}, {"sender", m.sender},
          {"body", m.body},             {"seq", m.seq},           {"timestamp", m.timestamp}};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t at = 0;
  while (at < path.size()) {
    const auto slash = path.find('/', at);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    if (end > at) parts.push_back(url_decode(path.substr(at, end - at)));
    at = end + 1;
  }
  return parts;
}

ApiResponse ok(ordered_json body, int status = 200) { return {status, json(std::move(body))}; }

ApiResponse method_not_allowed() {
  return {405, {{"error", {{"code", "MethodNotAllowed"}, {"message", "method not allowed"}}}}};
}

}  // namespace

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Unauthorized:
    case ErrorCode::AuthFailed:
      return 401;
    case ErrorCode::NotAMember:
    case ErrorCode::SubscribeRefused:
      return 403;
    case ErrorCode::GroupNotFound:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::EmailTaken:
    case ErrorCode::AlreadyMember:
    case ErrorCode::GroupFull:
      return 409;
    case ErrorCode::ModelUnavailable:
      return 503;
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::InvalidName:
    case ErrorCode::EmptyBody:
    case ErrorCode::BodyTooLarge:
    case ErrorCode::WeakPassword:
    case ErrorCode::InvalidEmail:
    case ErrorCode::BadRequest:
    case ErrorCode::AllPadding:
      return 400;
    default:
      return 500;
  }
}

json error_body(ErrorCode code, std::string_view message) {
  return {{"error", {{"code", std::string(to_string(code))}, {"message", std::string(message)}}}};
}

std::string url_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size()) {
      unsigned v = 0;
      const auto r = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      if (r.ec == std::errc() && r.ptr == s.data() + i + 3) {
        out += static_cast<char>(v);
        i += 2;
      } else {
        out += '%';
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view query) {
  std::map<std::string, std::string> out;
  while (!query.empty()) {
    const auto amp = query.find('&');
    const auto pair = query.substr(0, amp);
    const auto eq = pair.find('=');
    if (!pair.empty()) {
      out[url_decode(pair.substr(0, eq))] =
          eq == std::string_view::npos ? std::string() : url_decode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    query.remove_prefix(amp + 1);
  }
  return out;
}

std::string bearer_token(std::string_view header) {
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.substr(0, prefix.size()) != prefix) return {};
  header.remove_prefix(prefix.size());
  while (!header.empty() && header.front() == ' ') header.remove_prefix(1);
  while (!header.empty() && header.back() == ' ') header.remove_suffix(1);
  return std::string(header);
}

json group_message_frame(const constellation::Message& m) {
  return {{"type", "group_message"}, {"group_id", m.group_id}, {"seq", m.seq},
          {"sender", m.sender},      {"body", m.body},         {"timestamp", m.timestamp}};
}

// ---- Hub ----

std::uint64_t Hub::subscribe(const store::Store& store, const std::string& user,
                             const std::string& group_id, const std::shared_ptr<Subscriber>& sub) {
  // Membership check and registration happen under the store's read lock, so
  // no post can slip between the returned seq and the first pushed frame.
  return store.read([&](const store::StoreState& state) {
    const auto* group = state.groups.find(group_id);
    if (group == nullptr || !group->has_member(user)) {
      fail(ErrorCode::SubscribeRefused, "not a member of group " + group_id);
    }
    std::lock_guard lock(mutex_);
    groups_[group_id][sub.get()] = Entry{user, sub};
    return state.groups.last_seq(group_id);
  });
}

void Hub::unsubscribe(const std::string& group_id, const Subscriber* sub) {
  std::lock_guard lock(mutex_);
  auto it = groups_.find(group_id);
  if (it == groups_.end()) return;
  it->second.erase(sub);
  if (it->second.empty()) groups_.erase(it);
}

void Hub::drop(const Subscriber* sub) {
  std::lock_guard lock(mutex_);
  for (auto it = groups_.begin(); it != groups_.end();) {
    it->second.erase(sub);
    it = it->second.empty() ? groups_.erase(it) : std::next(it);
  }
}

std::size_t Hub::subscription_count() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [gid, subs] : groups_) n += subs.size();
  return n;
}

void Hub::on_event(const store::EventRecord& record, const store::StoreState& state) {
  if (record.kind != store::EventKind::MessagePosted &&
      record.kind != store::EventKind::MemberExited) {
    return;
  }
  const std::string gid = record.payload.at("group_id").get<std::string>();
  std::vector<std::shared_ptr<Subscriber>> targets;
  std::shared_ptr<const std::string> frame;
  {
    std::lock_guard lock(mutex_);
    auto it = groups_.find(gid);
    if (it == groups_.end()) return;

    if (record.kind == store::EventKind::MessagePosted) {
      const auto seq = record.payload.at("seq").get<std::uint64_t>();
      frame = std::make_shared<const std::string>(
          group_message_frame(state.groups.log(gid).at(seq - 1)).dump());
      for (auto e = it->second.begin(); e != it->second.end();) {
        if (auto sp = e->second.sub.lock()) {
          targets.push_back(std::move(sp));
          ++e;
        } else {
          e = it->second.erase(e);
        }
      }
    } else {
      const auto email = record.payload.at("email").get<std::string>();
      frame = std::make_shared<const std::string>(
          json{{"type", "unsubscribed"}, {"group_id", gid}, {"reason", "exited"}}.dump());
      for (auto e = it->second.begin(); e != it->second.end();) {
        if (e->second.user == email) {
          if (auto sp = e->second.sub.lock()) targets.push_back(std::move(sp));
          e = it->second.erase(e);
        } else {
          ++e;
        }
      }
    }
    if (it->second.empty()) groups_.erase(it);
  }
  for (const auto& t : targets) t->deliver(frame);
}

// ---- Gateway ----

Gateway::Gateway(store::Store& store, std::shared_ptr<const nn::TrainedModel> model,
                 GatewayConfig config)
    : store_(store),
      chatbot_(std::move(model), config.threshold),
      config_(std::move(config)),
      hasher_(config_.password),
      tokens_(config_.token_ttl,
              config_.clock ? config_.clock : [] { return std::chrono::system_clock::now(); }),
      rng_(config_.reply_seed != 0 ? config_.reply_seed : os_seed()) {
  if (!config_.clock) config_.clock = [] { return std::chrono::system_clock::now(); };
  store_.set_event_hook([this](const store::EventRecord& r, const store::StoreState& s) {
    hub_.on_event(r, s);
  });
}

Gateway::~Gateway() { store_.set_event_hook(nullptr); }

std::int64_t Gateway::now_ms() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             config_.clock().time_since_epoch())
      .count();
}

std::string Gateway::register_user(std::string_view email, std::string_view name,
                                   std::string_view password) {
  const std::string key = normalize_email(email);
  if (constellation::utf8_length(password) < kMinPasswordChars) {
    fail(ErrorCode::WeakPassword, "password must be at least 8 characters");
  }
  if (name.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    fail(ErrorCode::BadRequest, "name is empty");
  }
  if (store_.find_user(key)) fail(ErrorCode::EmailTaken, "email already registered");
  store_.register_user(key, std::string(name), hasher_.hash(password), now_ms());
  return tokens_.issue(key);
}

std::string Gateway::login(std::string_view email, std::string_view password) {
  std::optional<store::UserRecord> user;
  try {
    user = store_.find_user(normalize_email(email));
  } catch (const Error&) {
  }
  if (!user) {
    hasher_.verify_dummy(password);
    fail(ErrorCode::AuthFailed, "invalid email or password");
  }
  if (!hasher_.verify(user->password_hash, password)) {
    fail(ErrorCode::AuthFailed, "invalid email or password");
  }
  return tokens_.issue(user->email);
}

void Gateway::logout(std::string_view token) { tokens_.revoke(token); }

std::string Gateway::authenticate(std::string_view token) {
  if (token.empty()) fail(ErrorCode::Unauthorized, "missing bearer token");
  return tokens_.resolve(token);
}

dazai::BotReply Gateway::chat(const std::string& user, std::string_view text) {
  const auto& model = chatbot_.model();
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    fail(ErrorCode::EmptyBody, "text is empty");
  }
  if (constellation::utf8_length(text) > constellation::kMaxBodyChars) {
    fail(ErrorCode::BodyTooLarge, "text is too long");
  }

  std::lock_guard session_lock(chat_locks_[std::hash<std::string>{}(user) % chat_locks_.size()]);
  std::string sid;
  if (auto active = store_.active_session(user)) {
    sid = *active;
  } else {
    sid = store_.start_session(user, now_ms()).session_id;
  }
  const dazai::ChatSession session = store_.session(sid);

  dazai::BotReply reply;
  {
    std::lock_guard lock(rng_mutex_);
    reply = dazai::compose_reply(model, text, rng_, chatbot_.threshold());
  }
  const auto [user_turn, bot_turn] = dazai::make_turns(session, text, reply, now_ms());
  store_.append_exchange(sid, user_turn, bot_turn);
  return reply;
}

ApiResponse Gateway::handle(const ApiRequest& request) {
  try {
    const auto qmark = request.target.find('?');
    const std::string path = request.target.substr(0, qmark);
    const auto query = qmark == std::string::npos
                           ? std::map<std::string, std::string>{}
                           : parse_query(std::string_view(request.target).substr(qmark + 1));
    return route(request, path, query);
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e.code(), e.what())};
  } catch (const json::exception& e) {
    return {400, error_body(ErrorCode::BadRequest, e.what())};
  } catch (const std::exception& e) {
    return {500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}}};
  }
}

ApiResponse Gateway::route(const ApiRequest& req, const std::string& path,
                           const std::map<std::string, std::string>& query) {
  const auto parts = split_path(path);
  if (parts.empty() || parts[0] != "api") fail(ErrorCode::NotFound, "no such route");
  const bool post = req.method == "POST";
  const bool get = req.method == "GET";
  json holder;

  if (parts.size() == 2 && (parts[1] == "register" || parts[1] == "login")) {
    if (!post) return method_not_allowed();
    const json& body = object_body(req, holder);
    if (parts[1] == "register") {
      return ok({{"token", register_user(string_field(body, "email"), string_field(body, "name"),
                                         string_field(body, "password"))}},
                201);
    }
    return ok({{"token", login(string_field(body, "email"), string_field(body, "password"))}});
  }

  // Everything else needs a live token before any domain state is read.
  const std::string token = bearer_token(req.authorization);
  const std::string user = authenticate(token);

  if (parts.size() == 2 && parts[1] == "logout") {
    if (!post) return method_not_allowed();
    logout(token);
    return {204, nullptr};
  }
  if (parts.size() == 2 && parts[1] == "profile") {
    if (!get) return method_not_allowed();
    const auto u = store_.get_user(user);
    return ok({{"email", u.email}, {"name", u.name}, {"created_at", u.created_at}});
  }
  if (parts.size() == 2 && parts[1] == "chatbot") {
    if (!post) return method_not_allowed();
    const json& body = object_body(req, holder);
    const auto text = string_field(body, "text");
    const auto r = chat(user, text);
    return ok({{"tag", r.tag}, {"confidence", r.confidence}, {"reply", r.reply},
               {"fallback", r.fallback}});
  }
  if (parts.size() == 2 && parts[1] == "doctors") {
    if (!get) return method_not_allowed();
    return ok(store::content_to_json(store_.content()).at("doctors"));
  }
  if (parts.size() == 3 && parts[1] == "suggestions") {
    if (!get) return method_not_allowed();
    const auto content = store_.content();
    for (const auto& plan : content.suggestions) {
      if (plan.topic == parts[2]) {
        return ok({{"topic", plan.topic}, {"diet", plan.diet}, {"exercise", plan.exercise}});
      }
    }
    fail(ErrorCode::NotFound, "no suggestions for topic \"" + parts[2] + "\"");
  }

  if (parts.size() >= 2 && parts[1] == "groups") {
    if (parts.size() == 2) {
      if (get) {
        auto it = query.find("query");
        const auto found = store_.read([&](const store::StoreState& s) {
          return s.groups.search_groups(it == query.end() ? std::string() : it->second);
        });
        ordered_json arr = ordered_json::array();
        for (const auto& g : found) {
          arr.push_back({{"group_id", g.group_id}, {"name", g.name},
                         {"member_count", g.member_count}});
        }
        return ok(std::move(arr));
      }
      if (post) {
        const json& body = object_body(req, holder);
        return ok(group_json(store_.create_group(user, string_field(body, "name"), now_ms())),
                  201);
      }
      return method_not_allowed();
    }

    const std::string& gid = parts[2];
    if (parts.size() == 3) {
      if (!get) return method_not_allowed();
      const auto d = store_.read(
          [&](const store::StoreState& s) { return s.groups.group_details(user, gid); });
      ordered_json members = ordered_json::array();
      for (const auto& m : d.members) members.push_back({{"email", m}, {"admin", m == d.admin}});
      return ok({{"group_id", d.group_id}, {"name", d.name}, {"admin", d.admin},
                 {"members", std::move(members)}, {"member_count", d.member_count}});
    }
    if (parts.size() == 4 && (parts[3] == "join" || parts[3] == "exit")) {
      if (!post) return method_not_allowed();
      if (parts[3] == "join") {
        store_.join_group(user, gid, now_ms());
        return ok(group_json(store_.get_group(gid)));
      }
      store_.exit_group(user, gid, now_ms());
      return ok({{"group_id", gid}, {"exited", true}});
    }
    if (parts.size() == 4 && parts[3] == "messages") {
      if (get) {
        std::uint64_t since = 0;
        if (auto it = query.find("since"); it != query.end() && !it->second.empty()) {
          const auto& s = it->second;
          const auto r = std::from_chars(s.data(), s.data() + s.size(), since);
          if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            fail(ErrorCode::BadRequest, "since must be a non-negative integer");
          }
        }
        const auto msgs = store_.read([&](const store::StoreState& s) {
          return s.groups.fetch_messages(user, gid, since);
        });
        ordered_json arr = ordered_json::array();
        for (const auto& m : msgs) arr.push_back(message_json(m));
        return ok(std::move(arr));
      }
      if (post) {
        const json& body = object_body(req, holder);
        return ok(message_json(store_.post_message(user, gid, string_field(body, "body"), now_ms())),
                  201);
      }
      return method_not_allowed();
    }
  }
  fail(ErrorCode::NotFound, "no such route");
}

}  // namespace amity::gateway
