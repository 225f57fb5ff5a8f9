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

#include "clipscribe/captioner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "clipscribe/error.hpp"
#include "clipscribe/hashing.hpp"

namespace clipscribe {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string_view backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kScriptedMock: return "scripted";
    case BackendKind::kProceduralMock: return "procedural";
  }
  return "?";
}

void BackendSpec::validate() const {
  if (kind == BackendKind::kHttp && (!endpoint || endpoint->empty())) {
    throw Error(ErrorCode::kInvalidConfig, "http captioner requires an endpoint");
  }
  if (kind == BackendKind::kScriptedMock && !manifest) {
    throw Error(ErrorCode::kInvalidConfig, "scripted captioner requires a manifest");
  }
  if (parallelism < 1) throw Error(ErrorCode::kInvalidConfig, "parallelism must be >= 1");
  if (timeout_ms <= 0) throw Error(ErrorCode::kInvalidConfig, "timeout must be positive");
  if (max_retries < 0) throw Error(ErrorCode::kInvalidConfig, "max retries must be >= 0");
}

Lexicon Lexicon::builtin() {
  return Lexicon{
      {"man", "woman", "child", "dog", "cat", "boy", "girl", "person"},
      {"holds", "rides", "watches", "carries", "throws", "looks at", "walks toward", "sits near"},
      {"ball", "bicycle", "horse", "umbrella", "kite", "frisbee", "surfboard", "book"},
      {"park", "kitchen", "street", "field", "room", "beach", "city", "forest"},
  };
}

std::string quantized_signature_key(const FrameSignature& signature) {
  std::string key;
  key.reserve(signature.bins.size() * 6);
  char buf[32];
  for (std::size_t i = 0; i < signature.bins.size(); ++i) {
    if (i) key += ':';
    std::snprintf(buf, sizeof(buf), "%.3f", signature.bins[i]);
    key += buf;
  }
  return key;
}

std::string procedural_caption_from_hash(std::uint64_t hash, const Lexicon& lexicon) {
  if (lexicon.subjects.empty() || lexicon.verbs.empty() || lexicon.objects.empty() ||
      lexicon.scenes.empty()) {
    throw Error(ErrorCode::kEmptyLexicon, "every lexicon list must be non-empty");
  }
  auto digit = [&hash](const std::vector<std::string>& list) -> const std::string& {
    const auto& word = list[hash % list.size()];
    hash /= list.size();
    return word;
  };
  const auto& subject = digit(lexicon.subjects);
  const auto& verb = digit(lexicon.verbs);
  const auto& object = digit(lexicon.objects);
  const auto& scene = digit(lexicon.scenes);
  return "a " + subject + " " + verb + " a " + object + " in a " + scene + ".";
}

std::string procedural_caption(const FrameSignature& signature, const Lexicon& lexicon) {
  return procedural_caption_from_hash(fnv1a64(quantized_signature_key(signature)), lexicon);
}

// ---------------------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::map<std::size_t, std::string> table)
    : table_(std::move(table)) {}

std::map<std::size_t, std::string> ScriptedBackend::parse_manifest(const std::string& json_text) {
  auto doc = nlohmann::json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "manifest must be a JSON object");
  }
  std::map<std::size_t, std::string> table;
  for (const auto& [key, value] : doc.items()) {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
    if (key.empty() || ec != std::errc() || ptr != key.data() + key.size()) {
      throw Error(ErrorCode::kInvalidConfig, "manifest key is not a frame index: " + key);
    }
    if (!value.is_string()) {
      throw Error(ErrorCode::kInvalidConfig, "manifest entry " + key + " is not a string");
    }
    table[idx] = value.get<std::string>();
  }
  return table;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(
    const std::filesystem::path& manifest) {
  return std::make_unique<ScriptedBackend>(parse_manifest(read_file(manifest)));
}

Caption ScriptedBackend::caption(const Keyframe& keyframe) {
  auto it = table_.find(keyframe.frame_index);
  if (it == table_.end()) {
    throw Error(ErrorCode::kManifestMiss,
                "no scripted caption for frame " + std::to_string(keyframe.frame_index));
  }
  auto text = trim(it->second);
  if (text.empty()) {
    throw Error(ErrorCode::kEmptyCaption,
                "scripted caption for frame " + std::to_string(keyframe.frame_index) +
                    " is blank");
  }
  return Caption{keyframe.frame_index, std::move(text), std::nullopt, id_};
}

ProceduralBackend::ProceduralBackend(Lexicon lexicon) : lexicon_(std::move(lexicon)) {
  // Surface EmptyLexicon at construction rather than on first use.
  procedural_caption_from_hash(0, lexicon_);
}

Caption ProceduralBackend::caption(const Keyframe& keyframe) {
  return Caption{keyframe.frame_index, procedural_caption(keyframe.signature, lexicon_),
                 std::nullopt, id_};
}

// ---------------------------------------------------------------------------

CaptionCache::CaptionCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot create cache dir " + dir_->string());
  }
}

std::string CaptionCache::make_key(const std::string& backend_id,
                                   std::span<const std::uint8_t> payload) {
  return backend_id + "#" + sha256_hex(payload);
}

std::optional<CachedCaption> CaptionCache::load(const std::string& key) const {
  if (!dir_) return std::nullopt;
  auto path = *dir_ / (sha256_hex(key) + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  auto doc = nlohmann::json::parse(in, nullptr, false);
  // A corrupt or foreign entry is treated as a miss and overwritten.
  if (doc.is_discarded() || !doc.is_object() || doc.value("key", "") != key ||
      !doc.contains("caption") || !doc["caption"].is_string()) {
    return std::nullopt;
  }
  CachedCaption out{doc["caption"].get<std::string>(), std::nullopt};
  if (doc.contains("score") && doc["score"].is_number()) out.score = doc["score"].get<double>();
  return out;
}

void CaptionCache::store(const std::string& key, const CachedCaption& value) const {
  if (!dir_) return;
  nlohmann::json doc = {{"key", key}, {"caption", value.text}};
  if (value.score) doc["score"] = *value.score;
  const auto name = sha256_hex(key);
  auto tmp = *dir_ / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << doc.dump() << '\n';
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *dir_ / (name + ".json"), ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot commit cache entry " + name);
}

CachedCaption CaptionCache::get_or_compute(const std::string& key,
                                           const std::function<CachedCaption()>& compute) {
  std::promise<CachedCaption> promise;
  std::shared_future<CachedCaption> in_flight;
  {
    std::lock_guard lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      in_flight = it->second;
    } else {
      entries_.emplace(key, promise.get_future().share());
    }
  }
  if (in_flight.valid()) return in_flight.get();

  try {
    auto cached = load(key);
    CachedCaption value = cached ? *cached : compute();
    if (!cached) store(key, value);
    promise.set_value(value);
    return value;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    entries_.erase(key);
    throw;
  }
}

HttpCaptionBackend::HttpCaptionBackend(std::string endpoint, RetryPolicy policy,
                                       std::shared_ptr<HttpTransport> transport,
                                       std::shared_ptr<CaptionCache> cache, Sleeper sleep)
    : id_("http:" + endpoint),
      url_(),
      policy_(policy),
      transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<CaptionCache>()),
      sleep_(std::move(sleep)) {
  auto parsed = join_endpoint(endpoint, "/v1/caption");
  url_ = parsed.scheme_host_port + parsed.path;
}

std::string HttpCaptionBackend::request_body(const Keyframe& keyframe) {
  nlohmann::ordered_json req;
  req["id"] = std::to_string(keyframe.frame_index);
  req["width"] = keyframe.width;
  req["height"] = keyframe.height;
  req["format"] = "png-base64";
  req["data"] = base64_encode(keyframe.image_payload);
  return req.dump();
}

CachedCaption HttpCaptionBackend::parse_response(const std::string& body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kBadResponse, "caption response is not a JSON object");
  }
  auto it = doc.find("caption");
  if (it == doc.end() || !it->is_string()) {
    throw Error(ErrorCode::kBadResponse, "caption response lacks a string 'caption'");
  }
  CachedCaption out{trim(it->get<std::string>()), std::nullopt};
  if (auto s = doc.find("score"); s != doc.end() && !s->is_null()) {
    if (!s->is_number()) throw Error(ErrorCode::kBadResponse, "'score' is not a number");
    out.score = s->get<double>();
    if (!(*out.score >= 0.0 && *out.score <= 1.0)) {
      throw Error(ErrorCode::kBadResponse, "'score' outside [0, 1]");
    }
  }
  if (out.text.empty()) throw Error(ErrorCode::kEmptyCaption, "backend returned a blank caption");
  return out;
}

Caption HttpCaptionBackend::caption(const Keyframe& keyframe) {
  if (keyframe.image_payload.empty()) {
    throw Error(ErrorCode::kEmptyPlane,
                "key-frame " + std::to_string(keyframe.frame_index) + " has no image payload");
  }
  auto key = CaptionCache::make_key(id_, keyframe.image_payload);
  auto cached = cache_->get_or_compute(key, [&] {
    auto res = post_with_retry(*transport_, url_, request_body(keyframe), policy_, sleep_);
    return parse_response(res.body);
  });
  return Caption{keyframe.frame_index, std::move(cached.text), cached.score, id_};
}

std::unique_ptr<CaptionBackend> make_caption_backend(
    const BackendSpec& spec, std::optional<std::filesystem::path> cache_dir,
    std::shared_ptr<HttpTransport> transport, Sleeper sleep) {
  spec.validate();
  switch (spec.kind) {
    case BackendKind::kScriptedMock:
      return ScriptedBackend::from_file(*spec.manifest);
    case BackendKind::kProceduralMock:
      return std::make_unique<ProceduralBackend>();
    case BackendKind::kHttp: {
      RetryPolicy policy;
      policy.max_retries = spec.max_retries;
      policy.timeout = std::chrono::milliseconds(spec.timeout_ms);
      if (!transport) transport = make_default_transport();
      return std::make_unique<HttpCaptionBackend>(
          *spec.endpoint, policy, std::move(transport),
          std::make_shared<CaptionCache>(std::move(cache_dir)), std::move(sleep));
    }
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown captioner kind");
}

std::vector<Caption> caption_keyframes(CaptionBackend& backend,
                                       std::span<const Keyframe> keyframes,
                                       std::size_t parallelism) {
  const std::size_t n = keyframes.size();
  std::vector<std::optional<Caption>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = backend.caption(keyframes[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t threads = std::min(std::max<std::size_t>(parallelism, 1), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keyframes[a].frame_index < keyframes[b].frame_index;
  });

  std::vector<Caption> out;
  out.reserve(n);
  for (auto i : order) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

Document assemble_document(std::span<const Caption> captions) {
  if (captions.empty()) throw Error(ErrorCode::kEmptyCaptionList, "nothing to assemble");
  Document doc;
  for (const auto& c : captions) {
    auto text = trim(c.text);
    if (text.empty()) {
      throw Error(ErrorCode::kEmptyCaption,
                  "caption for frame " + std::to_string(c.frame_index) + " is blank");
    }
    if (!doc.text.empty()) doc.text += ' ';
    doc.provenance.push_back({c.frame_index, doc.text.size(), text.size()});
    doc.text += text;
    const char last = text.back();
    if (last != '.' && last != '!' && last != '?') doc.text += '.';
  }
  return doc;
}

}  // namespace clipscribe
