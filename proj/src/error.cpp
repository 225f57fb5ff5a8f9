// Copyright 2026 The clipscribe Authors
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

#include "clipscribe/error.hpp"

namespace clipscribe {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingMagic: return "MissingMagic";
    case ErrorCode::kMissingParam: return "MissingParam";
    case ErrorCode::kMalformedParam: return "MalformedParam";
    case ErrorCode::kUnsupportedChroma: return "UnsupportedChroma";
    case ErrorCode::kTruncatedFrame: return "TruncatedFrame";
    case ErrorCode::kBadFrameMarker: return "BadFrameMarker";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kMixedDimensions: return "MixedDimensions";
    case ErrorCode::kUndecodableImage: return "UndecodableImage";
    case ErrorCode::kEmptyPlane: return "EmptyPlane";
    case ErrorCode::kBinCountMismatch: return "BinCountMismatch";
    case ErrorCode::kEmptyStream: return "EmptyStream";
    case ErrorCode::kBackendUnreachable: return "BackendUnreachable";
    case ErrorCode::kBadResponse: return "BadResponse";
    case ErrorCode::kManifestMiss: return "ManifestMiss";
    case ErrorCode::kEmptyCaption: return "EmptyCaption";
    case ErrorCode::kEmptyLexicon: return "EmptyLexicon";
    case ErrorCode::kEmptyCaptionList: return "EmptyCaptionList";
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kEmptyCandidate: return "EmptyCandidate";
    case ErrorCode::kEmptyReferences: return "EmptyReferences";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
      return 2;
    case ErrorCode::kBackendUnreachable:
    case ErrorCode::kBadResponse:
    case ErrorCode::kManifestMiss:
    case ErrorCode::kEmptyCaption:
      return 4;
    case ErrorCode::kIoFailure:
      return 5;
    default:
      return 3;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

Error::Error(ErrorCode code, std::string stage, const std::string& what)
    : std::runtime_error(what), code_(code), stage_(std::move(stage)) {}

Error Error::with_stage(std::string stage) const {
  if (!stage_.empty()) return *this;
  std::string what = stage + ": " + this->what();
  return Error(code_, std::move(stage), what);
}

}  // namespace clipscribe
