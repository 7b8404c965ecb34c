// Copyright 2026 The rhsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rhsim/error.h"

namespace rhsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateOrg: return "DuplicateOrg";
    case ErrorCode::kZeroPeers: return "ZeroPeers";
    case ErrorCode::kUnknownOrg: return "UnknownOrg";
    case ErrorCode::kUnknownSigner: return "UnknownSigner";
    case ErrorCode::kUidCollision: return "UidCollision";
    case ErrorCode::kInvalidRoleTransition: return "InvalidRoleTransition";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidKey: return "InvalidKey";
    case ErrorCode::kChainBreak: return "ChainBreak";
    case ErrorCode::kAlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::kNotRegistered: return "NotRegistered";
    case ErrorCode::kRideInProgress: return "RideInProgress";
    case ErrorCode::kAlreadyDriver: return "AlreadyDriver";
    case ErrorCode::kRideAlreadyActive: return "RideAlreadyActive";
    case ErrorCode::kNotADriver: return "NotADriver";
    case ErrorCode::kRideNotFound: return "RideNotFound";
    case ErrorCode::kAlreadyAccepted: return "AlreadyAccepted";
    case ErrorCode::kNotOwner: return "NotOwner";
    case ErrorCode::kWrongStatus: return "WrongStatus";
    case ErrorCode::kNotAssignedDriver: return "NotAssignedDriver";
    case ErrorCode::kRideNotOngoing: return "RideNotOngoing";
    case ErrorCode::kWrongLocation: return "WrongLocation";
    case ErrorCode::kObserverNotPresent: return "ObserverNotPresent";
    case ErrorCode::kFieldAlreadySet: return "FieldAlreadySet";
    case ErrorCode::kNotPickedUp: return "NotPickedUp";
    case ErrorCode::kNoDestination: return "NoDestination";
    case ErrorCode::kRideNotCompleted: return "RideNotCompleted";
    case ErrorCode::kPermanentRideExists: return "PermanentRideExists";
    case ErrorCode::kInvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::kBadArguments: return "BadArguments";
    case ErrorCode::kUnknownFunction: return "UnknownFunction";
    case ErrorCode::kAccessDenied: return "AccessDenied";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kBadSignature: return "BadSignature";
    case ErrorCode::kUnknownEvent: return "UnknownEvent";
    case ErrorCode::kTimeTravel: return "TimeTravel";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kScenarioError: return "ScenarioError";
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kScenarioError); ++i) {
    auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace rhsim
