// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/gateway/auth.hpp"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

#include "amity/error.hpp"

namespace amity::gateway {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium failed to initialise");
}

}  // namespace

std::string normalize_email(std::string_view email) {
  const auto first = email.find_first_not_of(" \t");
  const auto last = email.find_last_not_of(" \t");
  if (first == std::string_view::npos) fail(ErrorCode::InvalidEmail, "email is empty");
  std::string e(email.substr(first, last - first + 1));
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });

  const auto at = e.find('@');
  const bool one_at = at != std::string::npos && e.find('@', at + 1) == std::string::npos;
  const bool has_space = std::any_of(e.begin(), e.end(), [](unsigned char c) { return c <= ' '; });
  if (!one_at || has_space || at == 0 || e.size() > 254) {
    fail(ErrorCode::InvalidEmail, "not a valid email address");
  }
  const std::string domain = e.substr(at + 1);
  const auto dot = domain.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == domain.size() ||
      domain.find("..") != std::string::npos) {
    fail(ErrorCode::InvalidEmail, "not a valid email address");
  }
  return e;
}

PasswordHasher::Params PasswordHasher::interactive() {
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

PasswordHasher::Params PasswordHasher::minimal() {
  return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
}

PasswordHasher::PasswordHasher(Params params) : params_(params) {
  ensure_sodium();
  dummy_hash_ = hash("dummy password for timing parity");
}

std::string PasswordHasher::hash(std::string_view password) const {
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), params_.ops_limit,
                        params_.mem_limit) != 0) {
    throw std::runtime_error("password hashing ran out of memory");
  }
  return out;
}

bool PasswordHasher::verify(std::string_view encoded, std::string_view password) const {
  const std::string z(encoded);
  return crypto_pwhash_str_verify(z.c_str(), password.data(), password.size()) == 0;
}

void PasswordHasher::verify_dummy(std::string_view password) const {
  (void)verify(dummy_hash_, password);
}

TokenTable::TokenTable(std::chrono::seconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {
  ensure_sodium();
}

std::string TokenTable::issue(const std::string& email) {
  unsigned char raw[32];
  randombytes_buf(raw, sizeof raw);
  char hex[2 * sizeof raw + 1];
  sodium_bin2hex(hex, sizeof hex, raw, sizeof raw);
  std::string token(hex);
  std::lock_guard lock(mutex_);
  tokens_[token] = {email, clock_() + ttl_};
  return token;
}

std::string TokenTable::resolve(std::string_view token) {
  std::lock_guard lock(mutex_);
  auto it = tokens_.find(std::string(token));
  if (it == tokens_.end()) fail(ErrorCode::Unauthorized, "missing or invalid token");
  if (clock_() >= it->second.expires) {
    tokens_.erase(it);
    fail(ErrorCode::Unauthorized, "token expired");
  }
  return it->second.email;
}

void TokenTable::revoke(std::string_view token) {
  std::lock_guard lock(mutex_);
  if (tokens_.erase(std::string(token)) == 0) {
    fail(ErrorCode::Unauthorized, "missing or invalid token");
  }
}

std::size_t TokenTable::live_count() {
  std::lock_guard lock(mutex_);
  const auto now = clock_();
  std::erase_if(tokens_, [&](const auto& kv) { return now >= kv.second.expires; });
  return tokens_.size();
}

}  // namespace amity::gateway
