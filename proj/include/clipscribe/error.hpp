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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clipscribe {

enum class ErrorCode {
  // ingest
  kMissingMagic,
  kMissingParam,
  kMalformedParam,
  kUnsupportedChroma,
  kTruncatedFrame,
  kBadFrameMarker,
  kEmptySequence,
  kMixedDimensions,
  kUndecodableImage,
  // keyframes
  kEmptyPlane,
  kBinCountMismatch,
  kEmptyStream,
  // captioner
  kBackendUnreachable,
  kBadResponse,
  kManifestMiss,
  kEmptyCaption,
  kEmptyLexicon,
  kEmptyCaptionList,
  // summarizer
  kEmptyDocument,
  // metrics
  kEmptyCandidate,
  kEmptyReferences,
  kCorpusTooSmall,
  // cli / plumbing
  kInvalidConfig,
  kIoFailure,
};

std::string_view error_code_name(ErrorCode code);

// Process exit status for a failure of the given kind:
// 2 config, 3 input/parse, 4 backend, 5 I/O.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  // Returns a copy tagged with the pipeline stage it escaped from.
  Error with_stage(std::string stage) const;

 private:
  Error(ErrorCode code, std::string stage, const std::string& what);

  ErrorCode code_;
  std::string stage_;
};

}  // namespace clipscribe
