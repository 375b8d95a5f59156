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

#include "specflow/error.hpp"

namespace specflow {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAProject: return "NotAProject";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MissingFrontMatter: return "MissingFrontMatter";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::InvalidRef: return "InvalidRef";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::NoWorkflowSection: return "NoWorkflowSection";
    case ErrorCode::DuplicateStage: return "DuplicateStage";
    case ErrorCode::DanglingMetadata: return "DanglingMetadata";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::PathOutsideDocs: return "PathOutsideDocs";
    case ErrorCode::IdenticalContent: return "IdenticalContent";
    case ErrorCode::NoSuchVersion: return "NoSuchVersion";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::WrongTierPath: return "WrongTierPath";
    case ErrorCode::AlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::RawTierWrite: return "RawTierWrite";
    case ErrorCode::NotRegistered: return "NotRegistered";
    case ErrorCode::TierViolation: return "TierViolation";
    case ErrorCode::ToolNotFound: return "ToolNotFound";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::RawTierViolation: return "RawTierViolation";
    case ErrorCode::PathOutsideProject: return "PathOutsideProject";
    case ErrorCode::ProvenanceError: return "ProvenanceError";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::TranscriptMismatch: return "TranscriptMismatch";
    case ErrorCode::ReviewPending: return "ReviewPending";
    case ErrorCode::NoPendingReview: return "NoPendingReview";
    case ErrorCode::UnknownStage: return "UnknownStage";
    case ErrorCode::EmptyFeedback: return "EmptyFeedback";
    case ErrorCode::DecisionUnderflow: return "DecisionUnderflow";
    case ErrorCode::GateBlocking: return "GateBlocking";
    case ErrorCode::NonEmptyTarget: return "NonEmptyTarget";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidResponse: return "InvalidResponse";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateCommand: return "DuplicateCommand";
    case ErrorCode::UnknownLayer: return "UnknownLayer";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

std::string describe_cycle(const std::vector<std::string>& cycle) {
  std::string s = "dependency cycle: ";
  for (size_t i = 0; i < cycle.size(); ++i) {
    if (i) s += " -> ";
    s += cycle[i];
  }
  return s;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error(ErrorCode::CycleDetected, describe_cycle(cycle)), cycle_(std::move(cycle)) {}

}  // namespace specflow
