// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amity {

// Every failure surfaced by the library carries one of these codes. The
// gateway maps them onto HTTP statuses and the `{"error":{"code":...}}`
// payload, so the spelling of each enumerator is part of the wire contract.
enum class ErrorCode {
  FileNotFound,
  ParseError,
  SchemaError,
  IoError,
  EmptyCorpus,
  AllPadding,
  ShapeMismatch,
  NonFiniteGradient,
  UnknownTag,
  EmptyEvalSet,
  VersionMismatch,
  ChecksumMismatch,
  ModelUnavailable,
  InvalidName,
  GroupNotFound,
  AlreadyMember,
  GroupFull,
  NotAMember,
  EmptyBody,
  BodyTooLarge,
  CorruptLog,
  NotFound,
  EmailTaken,
  WeakPassword,
  InvalidEmail,
  AuthFailed,
  Unauthorized,
  SubscribeRefused,
  AddressInUse,
  BadRequest,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace amity
