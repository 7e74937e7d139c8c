// Copyright 2026 The riskcal Authors
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

#include "riskcal/error.hpp"

namespace riskcal {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kConflictingClassification: return "ConflictingClassification";
    case ErrorCode::kEmptyProfile: return "EmptyProfile";
    case ErrorCode::kInvalidDictionary: return "InvalidDictionary";
    case ErrorCode::kNetworkFailure: return "NetworkFailure";
    case ErrorCode::kMalformedCatalog: return "MalformedCatalog";
    case ErrorCode::kUnknownPortal: return "UnknownPortal";
    case ErrorCode::kNotTabular: return "NotTabular";
    case ErrorCode::kRowSchemaMismatch: return "RowSchemaMismatch";
    case ErrorCode::kUnknownDataset: return "UnknownDataset";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kIncompleteLabeling: return "IncompleteLabeling";
    case ErrorCode::kUnknownAttribute: return "UnknownAttribute";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kEmptyCollection: return "EmptyCollection";
    case ErrorCode::kNoSharedAttributes: return "NoSharedAttributes";
    case ErrorCode::kInsufficientMembers: return "InsufficientMembers";
    case ErrorCode::kResultTooLarge: return "ResultTooLarge";
    case ErrorCode::kStepOutOfOrder: return "StepOutOfOrder";
    case ErrorCode::kUnknownCollection: return "UnknownCollection";
    case ErrorCode::kUnknownProfile: return "UnknownProfile";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kNothingToReport: return "NothingToReport";
    case ErrorCode::kAcknowledgmentRequired: return "AcknowledgmentRequired";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownStep: return "UnknownStep";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kCancelled: return "Cancelled";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace riskcal
