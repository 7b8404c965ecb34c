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

#ifndef RHSIM_ERROR_H_
#define RHSIM_ERROR_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rhsim {

// Every failure the library can raise. Chaincode codes travel inside
// rejected endorsements by name, so the names are part of the wire format.
enum class ErrorCode {
  // identity
  kDuplicateOrg,
  kZeroPeers,
  kUnknownOrg,
  kUnknownSigner,
  kUidCollision,
  kInvalidRoleTransition,
  kInvalidArgument,
  // ledger
  kInvalidKey,
  kChainBreak,
  // chaincode
  kAlreadyRegistered,
  kNotRegistered,
  kRideInProgress,
  kAlreadyDriver,
  kRideAlreadyActive,
  kNotADriver,
  kRideNotFound,
  kAlreadyAccepted,
  kNotOwner,
  kWrongStatus,
  kNotAssignedDriver,
  kRideNotOngoing,
  kWrongLocation,
  kObserverNotPresent,
  kFieldAlreadySet,
  kNotPickedUp,
  kNoDestination,
  kRideNotCompleted,
  kPermanentRideExists,
  kInvalidTimestamp,
  kBadArguments,
  kUnknownFunction,
  kAccessDenied,
  // txflow
  kVersionMismatch,
  kBadSignature,
  kUnknownEvent,
  // netsim
  kTimeTravel,
  kUnknownNode,
  // config / scenario
  kConfigError,
  kScenarioError,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit Error(ErrorCode code) : Error(code, "") {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rhsim

#endif  // RHSIM_ERROR_H_
