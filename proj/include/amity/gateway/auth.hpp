// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace amity::gateway {

using Clock = std::function<std::chrono::system_clock::time_point()>;

inline constexpr std::size_t kMinPasswordChars = 8;

// Lowercased, trimmed form used as the primary key; throws InvalidEmail when
// the address is not of the form local@domain.tld.
std::string normalize_email(std::string_view email);

/// Argon2id password hashing (libsodium's crypto_pwhash_str). The encoded
/// string carries its own salt and cost parameters.
class PasswordHasher {
 public:
  struct Params {
    unsigned long long ops_limit;
    std::size_t mem_limit;
  };
  static Params interactive();
  // The cheapest legal parameters; for tests.
  static Params minimal();

  explicit PasswordHasher(Params params);

  std::string hash(std::string_view password) const;
  // Constant-time check against an encoded hash.
  bool verify(std::string_view encoded, std::string_view password) const;
  // Burns one verification's worth of work for an unknown account so the
  // response time does not reveal whether the email exists.
  void verify_dummy(std::string_view password) const;

 private:
  Params params_;
  std::string dummy_hash_;
};

/// Server-side bearer tokens: 256 random bits, hex encoded, bound to one
/// user, with a fixed lifetime.
class TokenTable {
 public:
  TokenTable(std::chrono::seconds ttl, Clock clock);

  std::string issue(const std::string& email);
  // Email bound to a live token; throws Unauthorized otherwise.
  std::string resolve(std::string_view token);
  // Throws Unauthorized when the token is unknown or already revoked.
  void revoke(std::string_view token);
  std::size_t live_count();

 private:
  struct Entry {
    std::string email;
    std::chrono::system_clock::time_point expires;
  };

  std::mutex mutex_;
  std::unordered_map<std::string, Entry> tokens_;
  std::chrono::seconds ttl_;
  Clock clock_;
};

}  // namespace amity::gateway
