// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/error.hpp"

namespace amity {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::AllPadding: return "AllPadding";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::EmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ModelUnavailable: return "ModelUnavailable";
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::GroupNotFound: return "GroupNotFound";
    case ErrorCode::AlreadyMember: return "AlreadyMember";
    case ErrorCode::GroupFull: return "GroupFull";
    case ErrorCode::NotAMember: return "NotAMember";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::BodyTooLarge: return "BodyTooLarge";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmailTaken: return "EmailTaken";
    case ErrorCode::WeakPassword: return "WeakPassword";
    case ErrorCode::InvalidEmail: return "InvalidEmail";
    case ErrorCode::AuthFailed: return "AuthFailed";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::SubscribeRefused: return "SubscribeRefused";
    case ErrorCode::AddressInUse: return "AddressInUse";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace amity
