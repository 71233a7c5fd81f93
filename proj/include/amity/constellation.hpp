// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace amity::constellation {

inline constexpr std::size_t kMaxMembers = 256;
inline constexpr std::size_t kMaxNameChars = 64;
inline constexpr std::size_t kMaxBodyChars = 4096;

struct Group {
  std::string group_id;
  std::string name;
  std::string admin;
  std::vector<std::string> members;  // join order; front() joined earliest
  std::int64_t created_at = 0;

  bool has_member(std::string_view email) const;
  bool operator==(const Group&) const = default;
};

struct Message {
  std::string message_id;
  std::string group_id;
  std::string sender;
  std::string body;
  std::uint64_t seq = 0;
  std::int64_t timestamp = 0;

  bool operator==(const Message&) const = default;
};

struct GroupSummary {
  std::string group_id;
  std::string name;
  std::size_t member_count = 0;
};

struct GroupDetails {
  std::string group_id;
  std::string name;
  std::string admin;
  std::vector<std::string> members;
  std::size_t member_count = 0;
};

// Code points in a UTF-8 string (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s) noexcept;

/// Groups, rosters and per-group message logs.
///
/// Each operation comes in two halves: `check_*` validates against the
/// current state and throws the domain error, `apply_*` performs the change
/// assuming the check passed. The event store checks, appends the event, and
/// only then applies, so a failed append never leaves state ahead of the log.
/// The plain `create_group`/`join_group`/... members do both at once.
class GroupDirectory {
 public:
  void check_create(std::string_view name) const;
  void check_join(std::string_view user, std::string_view group_id) const;
  void check_exit(std::string_view user, std::string_view group_id) const;
  void check_post(std::string_view user, std::string_view group_id, std::string_view body) const;
  void check_member(std::string_view user, std::string_view group_id) const;

  const Group& apply_create(std::string group_id, std::string name, std::string admin,
                            std::int64_t created_at);
  void apply_join(std::string_view group_id, std::string user);
  // Removes the member; the earliest-joined remaining member inherits admin,
  // and an emptied group is deleted along with its log.
  void apply_exit(std::string_view group_id, std::string_view user);
  const Message& apply_post(std::string_view group_id, std::string sender, std::string body,
                            std::int64_t timestamp);

  const Group& create_group(std::string_view user, std::string_view name, std::string group_id,
                            std::int64_t created_at);
  void join_group(std::string_view user, std::string_view group_id);
  void exit_group(std::string_view user, std::string_view group_id);
  Message post_message(std::string_view user, std::string_view group_id, std::string_view body,
                       std::int64_t timestamp);

  // Case-insensitive substring match on name, oldest group first.
  std::vector<GroupSummary> search_groups(std::string_view query) const;
  std::vector<Message> fetch_messages(std::string_view user, std::string_view group_id,
                                      std::uint64_t since_seq) const;
  GroupDetails group_details(std::string_view user, std::string_view group_id) const;

  const Group* find(std::string_view group_id) const;
  const Group& get(std::string_view group_id) const;  // throws GroupNotFound
  const std::vector<Message>& log(std::string_view group_id) const;
  std::uint64_t last_seq(std::string_view group_id) const;
  std::size_t group_count() const noexcept { return groups_.size(); }
  const std::map<std::string, Group, std::less<>>& groups() const noexcept { return groups_; }

  // Throws std::logic_error naming the first violated invariant.
  void check_invariants() const;

 private:
  Group& mutable_group(std::string_view group_id);

  std::map<std::string, Group, std::less<>> groups_;
  std::map<std::string, std::vector<Message>, std::less<>> logs_;
  std::map<std::string, std::uint64_t, std::less<>> creation_rank_;
  std::uint64_t next_rank_ = 0;
};

}  // namespace amity::constellation
