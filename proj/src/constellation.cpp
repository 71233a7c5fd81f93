// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/constellation.hpp"

#include <algorithm>
#include <stdexcept>

#include "amity/error.hpp"

namespace amity::constellation {
namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

std::size_t utf8_length(std::string_view s) noexcept {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool Group::has_member(std::string_view email) const {
  return std::find(members.begin(), members.end(), email) != members.end();
}

const Group* GroupDirectory::find(std::string_view group_id) const {
  auto it = groups_.find(group_id);
  return it == groups_.end() ? nullptr : &it->second;
}

const Group& GroupDirectory::get(std::string_view group_id) const {
  const Group* g = find(group_id);
  if (g == nullptr) fail(ErrorCode::GroupNotFound, "no group " + std::string(group_id));
  return *g;
}

Group& GroupDirectory::mutable_group(std::string_view group_id) {
  auto it = groups_.find(group_id);
  if (it == groups_.end()) fail(ErrorCode::GroupNotFound, "no group " + std::string(group_id));
  return it->second;
}

const std::vector<Message>& GroupDirectory::log(std::string_view group_id) const {
  get(group_id);
  return logs_.find(group_id)->second;
}

std::uint64_t GroupDirectory::last_seq(std::string_view group_id) const {
  const auto& l = log(group_id);
  return l.empty() ? 0 : l.back().seq;
}

void GroupDirectory::check_create(std::string_view name) const {
  if (blank(name)) fail(ErrorCode::InvalidName, "group name must not be empty");
  if (utf8_length(name) > kMaxNameChars) {
    fail(ErrorCode::InvalidName, "group name is longer than 64 characters");
  }
}

void GroupDirectory::check_member(std::string_view user, std::string_view group_id) const {
  if (!get(group_id).has_member(user)) {
    fail(ErrorCode::NotAMember, std::string(user) + " is not a member of " + std::string(group_id));
  }
}

void GroupDirectory::check_join(std::string_view user, std::string_view group_id) const {
  const Group& g = get(group_id);
  if (g.has_member(user)) {
    fail(ErrorCode::AlreadyMember, std::string(user) + " already belongs to " + g.group_id);
  }
  if (g.members.size() >= kMaxMembers) {
    fail(ErrorCode::GroupFull, "group " + g.group_id + " already has 256 members");
  }
}

void GroupDirectory::check_exit(std::string_view user, std::string_view group_id) const {
  check_member(user, group_id);
}

void GroupDirectory::check_post(std::string_view user, std::string_view group_id,
                                std::string_view body) const {
  check_member(user, group_id);
  if (blank(body)) fail(ErrorCode::EmptyBody, "message body must not be empty");
  if (utf8_length(body) > kMaxBodyChars) {
    fail(ErrorCode::BodyTooLarge, "message body is longer than 4096 characters");
  }
}

const Group& GroupDirectory::apply_create(std::string group_id, std::string name,
                                          std::string admin, std::int64_t created_at) {
  if (groups_.count(group_id) != 0) {
    throw std::logic_error("duplicate group id " + group_id);
  }
  Group g{group_id, std::move(name), admin, {admin}, created_at};
  creation_rank_[group_id] = next_rank_++;
  logs_[group_id];
  return groups_.emplace(std::move(group_id), std::move(g)).first->second;
}

void GroupDirectory::apply_join(std::string_view group_id, std::string user) {
  mutable_group(group_id).members.push_back(std::move(user));
}

void GroupDirectory::apply_exit(std::string_view group_id, std::string_view user) {
  Group& g = mutable_group(group_id);
  g.members.erase(std::remove(g.members.begin(), g.members.end(), user), g.members.end());
  if (g.members.empty()) {
    const std::string id = g.group_id;
    groups_.erase(id);
    logs_.erase(id);
    creation_rank_.erase(id);
    return;
  }
  if (g.admin == user) g.admin = g.members.front();
}

const Message& GroupDirectory::apply_post(std::string_view group_id, std::string sender,
                                          std::string body, std::int64_t timestamp) {
  get(group_id);
  auto& l = logs_.find(group_id)->second;
  const std::uint64_t seq = l.empty() ? 1 : l.back().seq + 1;
  std::string id(group_id);
  l.push_back({id + "-" + std::to_string(seq), id, std::move(sender), std::move(body), seq,
               timestamp});
  return l.back();
}

const Group& GroupDirectory::create_group(std::string_view user, std::string_view name,
                                          std::string group_id, std::int64_t created_at) {
  check_create(name);
  return apply_create(std::move(group_id), std::string(name), std::string(user), created_at);
}

void GroupDirectory::join_group(std::string_view user, std::string_view group_id) {
  check_join(user, group_id);
  apply_join(group_id, std::string(user));
}

void GroupDirectory::exit_group(std::string_view user, std::string_view group_id) {
  check_exit(user, group_id);
  apply_exit(group_id, user);
}

Message GroupDirectory::post_message(std::string_view user, std::string_view group_id,
                                     std::string_view body, std::int64_t timestamp) {
  check_post(user, group_id, body);
  return apply_post(group_id, std::string(user), std::string(body), timestamp);
}

std::vector<GroupSummary> GroupDirectory::search_groups(std::string_view query) const {
  const std::string needle = ascii_lower(query);
  std::vector<std::pair<std::uint64_t, const Group*>> hits;
  for (const auto& [id, g] : groups_) {
    if (ascii_lower(g.name).find(needle) != std::string::npos) {
      hits.emplace_back(creation_rank_.find(id)->second, &g);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second->created_at != b.second->created_at) {
      return a.second->created_at < b.second->created_at;
    }
    return a.first < b.first;
  });
  std::vector<GroupSummary> out;
  out.reserve(hits.size());
  for (const auto& [rank, g] : hits) out.push_back({g->group_id, g->name, g->members.size()});
  return out;
}

std::vector<Message> GroupDirectory::fetch_messages(std::string_view user,
                                                    std::string_view group_id,
                                                    std::uint64_t since_seq) const {
  check_member(user, group_id);
  const auto& l = log(group_id);
  // seq k lives at index k-1.
  const std::size_t from = std::min<std::uint64_t>(since_seq, l.size());
  return {l.begin() + static_cast<std::ptrdiff_t>(from), l.end()};
}

GroupDetails GroupDirectory::group_details(std::string_view user,
                                           std::string_view group_id) const {
  check_member(user, group_id);
  const Group& g = get(group_id);
  return {g.group_id, g.name, g.admin, g.members, g.members.size()};
}

void GroupDirectory::check_invariants() const {
  for (const auto& [id, g] : groups_) {
    if (g.members.empty() || g.members.size() > kMaxMembers) {
      throw std::logic_error("group " + id + " has " + std::to_string(g.members.size()) +
                             " members");
    }
    if (!g.has_member(g.admin)) throw std::logic_error("admin of " + id + " is not a member");
    auto sorted = g.members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::logic_error("duplicate member in " + id);
    }
    const auto it = logs_.find(id);
    if (it == logs_.end()) throw std::logic_error("group " + id + " has no log");
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      if (it->second[k].seq != k + 1) throw std::logic_error("seq gap in " + id);
    }
  }
  if (logs_.size() != groups_.size()) throw std::logic_error("orphaned message log");
}

}  // namespace amity::constellation
