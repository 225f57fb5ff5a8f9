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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clipscribe/keyframes.hpp"
#include "clipscribe/transport.hpp"

namespace clipscribe {

struct Caption {
  std::size_t frame_index = 0;
  std::string text;
  std::optional<double> score;
  std::string backend_id;

  bool operator==(const Caption&) const = default;
};

enum class BackendKind { kHttp, kScriptedMock, kProceduralMock };

std::string_view backend_kind_name(BackendKind k);

struct BackendSpec {
  BackendKind kind = BackendKind::kProceduralMock;
  std::optional<std::string> endpoint;
  std::optional<std::filesystem::path> manifest;
  int timeout_ms = 10000;
  int max_retries = 3;
  std::size_t parallelism = 4;

  /// Throws Error(kInvalidConfig).
  void validate() const;
};

/// Word lists for the procedural test captioner.
struct Lexicon {
  std::vector<std::string> subjects;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;
  std::vector<std::string> scenes;

  static Lexicon builtin();
};

/// "b0:b1:..." with every bin printed to 3 decimal places.
std::string quantized_signature_key(const FrameSignature& signature);

/// Fills "a {subject} {verb} a {object} in a {scene}." from successive
/// mixed-radix digits of `hash` (subject is the least significant digit).
std::string procedural_caption_from_hash(std::uint64_t hash, const Lexicon& lexicon);

/// procedural_caption_from_hash(fnv1a64(quantized_signature_key(sig))).
std::string procedural_caption(const FrameSignature& signature, const Lexicon& lexicon);

/// A captioning backend. caption() must be safe to call concurrently.
class CaptionBackend {
 public:
  virtual ~CaptionBackend() = default;
  virtual const std::string& id() const = 0;
  virtual Caption caption(const Keyframe& keyframe) = 0;
};

class ScriptedBackend final : public CaptionBackend {
 public:
  explicit ScriptedBackend(std::map<std::size_t, std::string> table);

  /// Parses a manifest: a JSON object mapping decimal frame indices to
  /// caption strings. Throws Error(kInvalidConfig).
  static std::map<std::size_t, std::string> parse_manifest(const std::string& json_text);
  static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& manifest);

  const std::string& id() const override { return id_; }
  Caption caption(const Keyframe& keyframe) override;

 private:
  std::string id_ = "scripted_mock";
  std::map<std::size_t, std::string> table_;
};

class ProceduralBackend final : public CaptionBackend {
 public:
  explicit ProceduralBackend(Lexicon lexicon = Lexicon::builtin());

  const std::string& id() const override { return id_; }
  Caption caption(const Keyframe& keyframe) override;

 private:
  std::string id_ = "procedural_mock";
  Lexicon lexicon_;
};

/// Caption text and score as returned by a remote backend.
struct CachedCaption {
  std::string text;
  std::optional<double> score;
};

/// Content-addressed caption cache, optionally persisted as one JSON file per
/// entry under a directory. Concurrent lookups of the same key share a single
/// computation.
class CaptionCache {
 public:
  explicit CaptionCache(std::optional<std::filesystem::path> dir = std::nullopt);

  static std::string make_key(const std::string& backend_id,
                              std::span<const std::uint8_t> payload);

  CachedCaption get_or_compute(const std::string& key,
                               const std::function<CachedCaption()>& compute);

 private:
  std::optional<CachedCaption> load(const std::string& key) const;
  void store(const std::string& key, const CachedCaption& value) const;

  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<CachedCaption>> entries_;
};

class HttpCaptionBackend final : public CaptionBackend {
 public:
  HttpCaptionBackend(std::string endpoint, RetryPolicy policy,
                     std::shared_ptr<HttpTransport> transport,
                     std::shared_ptr<CaptionCache> cache, Sleeper sleep = real_sleeper());

  /// Request body for POST {endpoint}/v1/caption.
  static std::string request_body(const Keyframe& keyframe);
  /// Throws BadResponse / EmptyCaption.
  static CachedCaption parse_response(const std::string& body);

  const std::string& id() const override { return id_; }
  Caption caption(const Keyframe& keyframe) override;

 private:
  std::string id_;
  std::string url_;
  RetryPolicy policy_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<CaptionCache> cache_;
  Sleeper sleep_;
};

std::unique_ptr<CaptionBackend> make_caption_backend(
    const BackendSpec& spec, std::optional<std::filesystem::path> cache_dir = std::nullopt,
    std::shared_ptr<HttpTransport> transport = nullptr, Sleeper sleep = real_sleeper());

/// Captions every key-frame with at most `parallelism` requests in flight.
/// Results are ordered by frame index; if any call fails, the failure of the
/// earliest failing key-frame is rethrown.
std::vector<Caption> caption_keyframes(CaptionBackend& backend,
                                       std::span<const Keyframe> keyframes,
                                       std::size_t parallelism);

struct ProvenanceSpan {
  std::size_t frame_index = 0;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct Document {
  std::string text;
  std::vector<ProvenanceSpan> provenance;
};

/// Trims each caption, terminates it with '.' unless it already ends in
/// '.', '!' or '?', and joins with single spaces. Spans cover the trimmed
/// caption text.
Document assemble_document(std::span<const Caption> captions);

std::string trim(std::string_view s);

}  // namespace clipscribe
