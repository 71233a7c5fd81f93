// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace amity::store {

enum class EventKind {
  UserRegistered,
  GroupCreated,
  MemberJoined,
  MemberExited,
  MessagePosted,
  SessionStarted,
  SessionTurn,
  ContentSeeded,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view s) noexcept;

struct EventRecord {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::UserRegistered;
  nlohmann::json payload;

  bool operator==(const EventRecord&) const = default;
};

struct LogOptions {
  // fdatasync after every append. Without it an append survives a process
  // crash but not a power loss.
  bool sync = true;
  std::function<void(const std::string&)> on_warning;
};

/// Append-only event file `<dir>/events.log` plus `<dir>/VERSION`.
///
/// Frame: u32 LE length | JSON {"seq","kind","payload"} | u32 LE CRC-32 of
/// (length bytes + JSON). On open the log is scanned; a bad frame with no
/// valid frame anywhere after it is a torn tail and is truncated away, a bad
/// frame followed by a valid one is mid-log corruption (CorruptLog).
class EventLog {
 public:
  static constexpr std::uint32_t kMaxRecordBytes = 16u << 20;

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  EventLog(EventLog&& other) noexcept;
  EventLog& operator=(EventLog&& other) noexcept;
  ~EventLog();

  // Opens (creating if needed) and replays; every recovered record is passed
  // to `visit` in seq order before open returns.
  static EventLog open(const std::filesystem::path& dir, const LogOptions& options,
                       const std::function<void(const EventRecord&)>& visit);

  // Writes one frame and flushes it; returns the assigned seq.
  std::uint64_t append(EventKind kind, const nlohmann::json& payload);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  static std::string encode_frame(const EventRecord& record);

 private:
  EventLog() = default;

  int fd_ = -1;
  std::filesystem::path path_;
  std::uint64_t last_seq_ = 0;
  LogOptions options_;
};

}  // namespace amity::store
