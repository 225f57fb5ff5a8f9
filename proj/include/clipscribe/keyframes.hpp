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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "clipscribe/ingest.hpp"

namespace clipscribe {

inline constexpr std::size_t kDefaultSignatureBins = 64;

/// Normalized luma histogram. Bin k covers [k*256/B, (k+1)*256/B).
struct FrameSignature {
  std::vector<double> bins;

  bool operator==(const FrameSignature&) const = default;
};

FrameSignature frame_signature(std::span<const std::uint8_t> luma,
                               std::size_t bins = kDefaultSignatureBins);

/// L1 distance, in [0, 2].
double signature_distance(const FrameSignature& a, const FrameSignature& b);

enum class SelectionMode { kChangeDetect, kUniform };

struct KeyframeConfig {
  double threshold = 0.3;  // on the [0, 2] L1 scale
  std::size_t min_gap = 0;
  std::optional<std::size_t> max_keyframes;
  SelectionMode mode = SelectionMode::kChangeDetect;
  std::size_t uniform_count = 0;  // k for uniform(k)
  std::size_t bins = kDefaultSignatureBins;

  /// Throws Error(kInvalidConfig).
  void validate() const;
};

struct Selection {
  std::size_t frame_index = 0;
  double distance = 0.0;  // from the previously selected key-frame

  bool operator==(const Selection&) const = default;
};

/// Incremental change detector. Frames must be offered in index order.
class ChangeDetector {
 public:
  explicit ChangeDetector(const KeyframeConfig& config);

  /// Distance to the last key-frame if this frame is selected.
  std::optional<double> offer(std::size_t index, const FrameSignature& sig);

  std::size_t selected_count() const { return selected_; }

 private:
  double threshold_;
  std::size_t min_gap_;
  std::optional<std::size_t> max_keyframes_;
  std::size_t selected_ = 0;
  std::size_t last_index_ = 0;
  FrameSignature last_;
};

/// Indices round(j*(n-1)/(k-1)) for j = 0..k-1, duplicates collapsed.
std::vector<std::size_t> uniform_indices(std::size_t n, std::size_t k);

std::vector<Selection> select_keyframes(std::span<const FrameSignature> stream,
                                        const KeyframeConfig& config);

struct Keyframe {
  std::size_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  FrameSignature signature;
  std::vector<std::uint8_t> image_payload;  // grayscale PNG
  double distance_from_previous = 0.0;
};

Keyframe make_keyframe(const Frame& frame, FrameSignature signature, double distance);

struct ExtractionResult {
  StreamMeta meta;
  std::size_t frame_count = 0;
  std::vector<Keyframe> keyframes;
};

/// Drains `source`, selecting key-frames. Change detection streams; uniform
/// mode needs the frame count and therefore buffers every luma plane.
ExtractionResult extract_keyframes(FrameSource& source, const KeyframeConfig& config);

}  // namespace clipscribe
