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

#include "clipscribe/keyframes.hpp"

#include <cmath>
#include <string>

#include "clipscribe/error.hpp"
#include "clipscribe/image_codec.hpp"

namespace clipscribe {

FrameSignature frame_signature(std::span<const std::uint8_t> luma, std::size_t bins) {
  if (luma.empty()) throw Error(ErrorCode::kEmptyPlane, "cannot fingerprint an empty plane");
  if (bins == 0 || bins > 256) {
    throw Error(ErrorCode::kInvalidConfig, "bin count must be in [1, 256]");
  }
  std::vector<std::size_t> counts(bins, 0);
  for (auto v : luma) ++counts[std::size_t{v} * bins / 256];

  FrameSignature sig;
  sig.bins.resize(bins);
  const double total = static_cast<double>(luma.size());
  for (std::size_t k = 0; k < bins; ++k) sig.bins[k] = static_cast<double>(counts[k]) / total;
  return sig;
}

double signature_distance(const FrameSignature& a, const FrameSignature& b) {
  if (a.bins.size() != b.bins.size()) {
    throw Error(ErrorCode::kBinCountMismatch, std::to_string(a.bins.size()) + " vs " +
                                                  std::to_string(b.bins.size()) + " bins");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) d += std::abs(a.bins[i] - b.bins[i]);
  return d;
}

void KeyframeConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "keyframe threshold must lie in (0, 2]");
  }
  if (max_keyframes && *max_keyframes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max keyframes must be at least 1");
  }
  if (mode == SelectionMode::kUniform && uniform_count < 1) {
    throw Error(ErrorCode::kInvalidConfig, "uniform mode needs k >= 1");
  }
  if (bins == 0 || bins > 256) {
    throw Error(ErrorCode::kInvalidConfig, "bin count must be in [1, 256]");
  }
}

ChangeDetector::ChangeDetector(const KeyframeConfig& config)
    : threshold_(config.threshold),
      min_gap_(config.min_gap),
      max_keyframes_(config.max_keyframes) {}

std::optional<double> ChangeDetector::offer(std::size_t index, const FrameSignature& sig) {
  if (max_keyframes_ && selected_ >= *max_keyframes_) return std::nullopt;
  if (selected_ == 0) {
    last_ = sig;
    last_index_ = index;
    selected_ = 1;
    return 0.0;
  }
  if (index - last_index_ <= min_gap_) return std::nullopt;
  const double d = signature_distance(sig, last_);
  if (d < threshold_) return std::nullopt;
  last_ = sig;
  last_index_ = index;
  ++selected_;
  return d;
}

std::vector<std::size_t> uniform_indices(std::size_t n, std::size_t k) {
  if (n <= 1 || k <= 1) return {0};
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    // Exact rational rounding of j*(n-1)/(k-1), halves up.
    const std::size_t idx = (2 * j * (n - 1) + (k - 1)) / (2 * (k - 1));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

std::vector<Selection> select_keyframes(std::span<const FrameSignature> stream,
                                        const KeyframeConfig& config) {
  if (stream.empty()) throw Error(ErrorCode::kEmptyStream, "no frames to select from");
  config.validate();

  std::vector<Selection> out;
  if (config.mode == SelectionMode::kChangeDetect) {
    ChangeDetector detector(config);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      if (auto d = detector.offer(i, stream[i])) out.push_back({i, *d});
    }
    return out;
  }

  for (auto idx : uniform_indices(stream.size(), config.uniform_count)) {
    if (config.max_keyframes && out.size() >= *config.max_keyframes) break;
    const double d =
        out.empty() ? 0.0 : signature_distance(stream[idx], stream[out.back().frame_index]);
    out.push_back({idx, d});
  }
  return out;
}

Keyframe make_keyframe(const Frame& frame, FrameSignature signature, double distance) {
  Keyframe kf;
  kf.frame_index = frame.index;
  kf.timestamp_ms = frame.timestamp_ms;
  kf.width = frame.width;
  kf.height = frame.height;
  kf.signature = std::move(signature);
  kf.image_payload = encode_png_gray(frame.width, frame.height, frame.luma);
  kf.distance_from_previous = distance;
  return kf;
}

ExtractionResult extract_keyframes(FrameSource& source, const KeyframeConfig& config) {
  config.validate();
  ExtractionResult result;
  result.meta = source.meta();

  if (config.mode == SelectionMode::kChangeDetect) {
    ChangeDetector detector(config);
    while (auto frame = source.next()) {
      ++result.frame_count;
      auto sig = frame_signature(frame->luma, config.bins);
      if (auto d = detector.offer(frame->index, sig)) {
        result.keyframes.push_back(make_keyframe(*frame, std::move(sig), *d));
      }
    }
    if (result.frame_count == 0) throw Error(ErrorCode::kEmptyStream, "video has no frames");
    return result;
  }

  std::vector<Frame> frames;
  std::vector<FrameSignature> sigs;
  while (auto frame = source.next()) {
    sigs.push_back(frame_signature(frame->luma, config.bins));
    frames.push_back(std::move(*frame));
  }
  result.frame_count = frames.size();
  for (const auto& sel : select_keyframes(sigs, config)) {
    result.keyframes.push_back(
        make_keyframe(frames[sel.frame_index], sigs[sel.frame_index], sel.distance));
  }
  return result;
}

}  // namespace clipscribe
