// Copyright 2026 The Specflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specflow {

/// Stable error identifiers. The numeric values are part of the C API and
/// the CLI exit-code contract; append new codes, never renumber.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  NotAProject = 2,
  NotFound = 3,
  MissingFrontMatter = 4,
  UnknownCategory = 5,
  InvalidRef = 6,
  EmptyBody = 7,
  MissingField = 8,
  NoWorkflowSection = 9,
  DuplicateStage = 10,
  DanglingMetadata = 11,
  UnknownCommand = 12,
  CycleDetected = 13,
  UnknownNode = 14,
  PathOutsideDocs = 15,
  IdenticalContent = 16,
  NoSuchVersion = 17,
  EmptyQuery = 18,
  WrongTierPath = 19,
  AlreadyRegistered = 20,
  UnknownSource = 21,
  RawTierWrite = 22,
  NotRegistered = 23,
  TierViolation = 24,
  ToolNotFound = 25,
  ParseFailure = 26,
  RawTierViolation = 27,
  PathOutsideProject = 28,
  ProvenanceError = 29,
  BackendError = 30,
  TranscriptMismatch = 31,
  ReviewPending = 32,
  NoPendingReview = 33,
  UnknownStage = 34,
  EmptyFeedback = 35,
  DecisionUnderflow = 36,
  GateBlocking = 37,
  NonEmptyTarget = 38,
  InvalidConfig = 39,
  InvalidResponse = 40,
  IoError = 41,
  DuplicateCommand = 42,
  UnknownLayer = 43,
  Internal = 44,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by graph operations; carries the offending cycle in visit order,
/// first node repeated at the end.
class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);

  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace specflow
