// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/event_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "amity/checksum.hpp"
#include "amity/error.hpp"

namespace amity::store {
namespace {

constexpr std::string_view kLogVersion = "1";

[[noreturn]] void io_error(const std::string& what) {
  fail(ErrorCode::IoError, what + ": " + std::strerror(errno));
}

struct Decoded {
  enum class Status { ok, torn, corrupt } status = Status::torn;
  EventRecord record;
  std::size_t frame_bytes = 0;
  std::string why;
};

// A frame whose CRC checks out was written by us; if it then fails to decode
// the log is corrupt, not torn.
bool frame_checks_out(std::string_view data, std::size_t at, std::size_t* frame_bytes) {
  if (data.size() - at < 8) return false;
  const std::uint32_t len = get_u32_le(data.data() + at);
  if (len == 0 || len > EventLog::kMaxRecordBytes || data.size() - at - 8 < len) return false;
  const std::uint32_t stored = get_u32_le(data.data() + at + 4 + len);
  if (crc32(data.substr(at, 4 + len)) != stored) return false;
  if (frame_bytes) *frame_bytes = 8 + len;
  return true;
}

Decoded decode_at(std::string_view data, std::size_t at, std::uint64_t expected_seq) {
  Decoded d;
  if (!frame_checks_out(data, at, &d.frame_bytes)) {
    d.status = Decoded::Status::torn;
    return d;
  }
  d.status = Decoded::Status::corrupt;
  const std::string_view body = data.substr(at + 4, d.frame_bytes - 8);
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    d.why = "record is not a JSON object";
    return d;
  }
  const auto seq = j.find("seq");
  const auto kind = j.find("kind");
  const auto payload = j.find("payload");
  if (seq == j.end() || !seq->is_number_unsigned() || kind == j.end() || !kind->is_string() ||
      payload == j.end() || !payload->is_object()) {
    d.why = "record lacks seq/kind/payload";
    return d;
  }
  auto parsed_kind = parse_event_kind(kind->get<std::string>());
  if (!parsed_kind) {
    d.why = "unknown event kind " + kind->dump();
    return d;
  }
  d.record.seq = seq->get<std::uint64_t>();
  if (d.record.seq != expected_seq) {
    d.why = "expected seq " + std::to_string(expected_seq) + ", found " +
            std::to_string(d.record.seq);
    return d;
  }
  d.record.kind = *parsed_kind;
  d.record.payload = std::move(*payload);
  d.status = Decoded::Status::ok;
  return d;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void ensure_version_file(const std::filesystem::path& dir) {
  const auto path = dir / "VERSION";
  if (std::filesystem::exists(path)) {
    std::string text = read_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
      text.pop_back();
    }
    if (text != kLogVersion) {
      fail(ErrorCode::VersionMismatch, "store " + dir.string() + " has VERSION \"" + text + "\"");
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << kLogVersion << '\n';
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
}

void write_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error("write to event log failed");
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::UserRegistered: return "UserRegistered";
    case EventKind::GroupCreated: return "GroupCreated";
    case EventKind::MemberJoined: return "MemberJoined";
    case EventKind::MemberExited: return "MemberExited";
    case EventKind::MessagePosted: return "MessagePosted";
    case EventKind::SessionStarted: return "SessionStarted";
    case EventKind::SessionTurn: return "SessionTurn";
    case EventKind::ContentSeeded: return "ContentSeeded";
  }
  return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
  for (auto k : {EventKind::UserRegistered, EventKind::GroupCreated, EventKind::MemberJoined,
                 EventKind::MemberExited, EventKind::MessagePosted, EventKind::SessionStarted,
                 EventKind::SessionTurn, EventKind::ContentSeeded}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string EventLog::encode_frame(const EventRecord& record) {
  nlohmann::ordered_json j;
  j["seq"] = record.seq;
  j["kind"] = std::string(to_string(record.kind));
  j["payload"] = record.payload;
  const std::string body = j.dump();
  std::string frame(4, '\0');
  put_u32_le(static_cast<std::uint32_t>(body.size()), frame.data());
  frame += body;
  char crc[4];
  put_u32_le(crc32(frame), crc);
  frame.append(crc, 4);
  return frame;
}

EventLog::EventLog(EventLog&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      path_(std::move(other.path_)),
      last_seq_(other.last_seq_),
      options_(std::move(other.options_)) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    path_ = std::move(other.path_);
    last_seq_ = other.last_seq_;
    options_ = std::move(other.options_);
  }
  return *this;
}

EventLog::~EventLog() {
  if (fd_ >= 0) {
    ::fsync(fd_);
    ::close(fd_);
  }
}

EventLog EventLog::open(const std::filesystem::path& dir, const LogOptions& options,
                        const std::function<void(const EventRecord&)>& visit) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    fail(ErrorCode::IoError, "cannot create store directory " + dir.string());
  }
  ensure_version_file(dir);

  EventLog log;
  log.options_ = options;
  log.path_ = dir / "events.log";
  const std::string data = read_file(log.path_);

  std::size_t offset = 0;
  std::uint64_t expected = 1;
  while (offset < data.size()) {
    Decoded d = decode_at(data, offset, expected);
    if (d.status == Decoded::Status::ok) {
      visit(d.record);
      offset += d.frame_bytes;
      ++expected;
      continue;
    }
    if (d.status == Decoded::Status::corrupt) {
      fail(ErrorCode::CorruptLog, "event log corrupt at byte " + std::to_string(offset) + ": " +
                                      d.why);
    }
    for (std::size_t probe = offset + 1; probe + 8 <= data.size(); ++probe) {
      if (frame_checks_out(data, probe, nullptr)) {
        fail(ErrorCode::CorruptLog, "event log damaged at byte " + std::to_string(offset) +
                                        " with valid records after it");
      }
    }
    const std::string warning = "event log: dropping " + std::to_string(data.size() - offset) +
                                " byte torn tail at offset " + std::to_string(offset);
    if (log.options_.on_warning) {
      log.options_.on_warning(warning);
    } else {
      std::cerr << "warning: " << warning << '\n';
    }
    std::filesystem::resize_file(log.path_, offset, ec);
    if (ec) fail(ErrorCode::IoError, "cannot truncate torn event log tail");
    break;
  }
  log.last_seq_ = expected - 1;

  log.fd_ = ::open(log.path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (log.fd_ < 0) io_error("cannot open " + log.path_.string());
  if (::fsync(log.fd_) != 0) io_error("cannot sync " + log.path_.string());
  return log;
}

std::uint64_t EventLog::append(EventKind kind, const nlohmann::json& payload) {
  if (fd_ < 0) fail(ErrorCode::IoError, "event log is closed");
  const EventRecord record{last_seq_ + 1, kind, payload};
  const std::string frame = encode_frame(record);
  if (frame.size() - 8 > kMaxRecordBytes) fail(ErrorCode::IoError, "event record too large");

  const off_t before = ::lseek(fd_, 0, SEEK_END);
  try {
    write_all(fd_, frame);
    if (options_.sync && ::fdatasync(fd_) != 0) io_error("fdatasync on event log failed");
  } catch (...) {
    // Never leave a half frame behind a record that might still succeed.
    if (before >= 0 && ::ftruncate(fd_, before) != 0) {
      std::cerr << "warning: could not roll back partial event log write\n";
    }
    throw;
  }
  last_seq_ = record.seq;
  return record.seq;
}

}  // namespace amity::store
