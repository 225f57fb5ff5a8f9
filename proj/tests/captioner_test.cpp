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

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "clipscribe/captioner.hpp"
#include "clipscribe/error.hpp"
#include "clipscribe/hashing.hpp"
#include "support/fixtures.hpp"

using namespace clipscribe;
using namespace std::chrono_literals;

namespace {

// Reference FNV-1a, written out independently of the library.
std::uint64_t reference_fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

Keyframe keyframe(std::size_t index, std::uint8_t fill = 0) {
  Frame f{index, static_cast<std::int64_t>(index) * 40, 4, 2, std::vector<std::uint8_t>(8, fill)};
  return make_keyframe(f, frame_signature(f.luma), 0.0);
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIoFailure;
}

/// Scripted transport: answers from a queue (last answer repeats) and records
/// every request.
class RecordingTransport : public HttpTransport {
 public:
  explicit RecordingTransport(std::vector<std::optional<HttpResponse>> answers)
      : answers_(std::move(answers)) {}

  std::optional<HttpResponse> post_json(const std::string& url, const std::string& body,
                                        std::chrono::milliseconds) override {
    std::lock_guard lock(mu_);
    urls.push_back(url);
    bodies.push_back(body);
    auto i = std::min(calls++, answers_.size() - 1);
    return answers_[i];
  }

  std::size_t calls = 0;
  std::vector<std::string> urls;
  std::vector<std::string> bodies;

 private:
  std::mutex mu_;
  std::vector<std::optional<HttpResponse>> answers_;
};

HttpResponse ok(const std::string& caption) {
  return {200, nlohmann::json{{"caption", caption}}.dump()};
}

struct SleepLog {
  std::vector<std::chrono::milliseconds> waits;
  Sleeper sleeper() {
    return [this](std::chrono::milliseconds d) { waits.push_back(d); };
  }
};

}  // namespace

TEST_CASE("scripted backend: lookup, miss, blank") {
  ScriptedBackend backend({{0, "a man rides a horse."}, {3, "   "}});
  CHECK(backend.caption(keyframe(0)).text == "a man rides a horse.");
  CHECK(backend.caption(keyframe(0)).backend_id == "scripted_mock");
  CHECK(code_of([&] { backend.caption(keyframe(5)); }) == ErrorCode::kManifestMiss);
  CHECK(code_of([&] { backend.caption(keyframe(3)); }) == ErrorCode::kEmptyCaption);
}

TEST_CASE("scripted manifest parsing") {
  auto table = ScriptedBackend::parse_manifest(R"({"0": "x", "12": "y"})");
  CHECK(table.size() == 2);
  CHECK(table.at(12) == "y");
  CHECK(code_of([] { ScriptedBackend::parse_manifest("[1]"); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { ScriptedBackend::parse_manifest(R"({"a": "x"})"); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { ScriptedBackend::parse_manifest(R"({"1": 5})"); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(code_of([] { ScriptedBackend::parse_manifest("{"); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("FNV-1a matches the reference and published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  for (const char* s : {"0.500:0.500", "b0:b1", "xyz"}) CHECK(fnv1a64(s) == reference_fnv1a(s));
}

TEST_CASE("procedural captions") {
  const auto lex = Lexicon::builtin();
  CHECK(procedural_caption_from_hash(0, lex) == "a man holds a ball in a park.");
  // subject digit 1, verb digit 2, object digit 3, scene digit 4 (radix 8).
  CHECK(procedural_caption_from_hash(1 + 8 * 2 + 64 * 3 + 512 * 4, lex) ==
        "a woman watches a umbrella in a room.");

  FrameSignature a{std::vector<double>(64, 0.0)};
  a.bins[0] = a.bins[63] = 0.5;
  FrameSignature b = a;
  b.bins[0] = 0.499;
  b.bins[1] = 0.001;
  CHECK(quantized_signature_key(a).substr(0, 12) == "0.500:0.000:");
  // Values from tests/oracles/freeze_values.py.
  CHECK(reference_fnv1a(quantized_signature_key(a)) == 0xfea6ebe2cd850fadULL);
  CHECK(reference_fnv1a(quantized_signature_key(b)) == 0xb811a8c1fc2debcfULL);
  CHECK(procedural_caption(a, lex) == "a boy looks at a surfboard in a forest.");
  CHECK(procedural_caption(b, lex) == "a person rides a book in a beach.");
  CHECK(procedural_caption(a, lex) == procedural_caption(FrameSignature{a}, lex));

  ProceduralBackend backend;
  auto k = keyframe(2, 77);
  CHECK(backend.caption(k) == backend.caption(k));

  Lexicon empty = lex;
  empty.scenes.clear();
  CHECK(code_of([&] { procedural_caption(a, empty); }) == ErrorCode::kEmptyLexicon);
  CHECK(code_of([&] { ProceduralBackend{empty}; }) == ErrorCode::kEmptyLexicon);
}

TEST_CASE("assemble_document") {
  auto doc = assemble_document(std::vector<Caption>{{0, "a dog runs", {}, ""}});
  CHECK(doc.text == "a dog runs.");

  auto dup = assemble_document(
      std::vector<Caption>{{0, "a dog runs.", {}, ""}, {5, "a dog runs.", {}, ""}});
  CHECK(dup.text == "a dog runs. a dog runs.");
  CHECK(dup.provenance.size() == 2);

  auto mixed = assemble_document(std::vector<Caption>{{0, "x!", {}, ""}, {1, "  y ", {}, ""}});
  CHECK(mixed.text == "x! y.");
  CHECK(mixed.provenance[1].offset == 3);
  CHECK(mixed.provenance[1].length == 1);

  CHECK(code_of([] { assemble_document(std::vector<Caption>{}); }) ==
        ErrorCode::kEmptyCaptionList);
  CHECK(code_of([] { assemble_document(std::vector<Caption>{{0, " \t", {}, ""}}); }) ==
        ErrorCode::kEmptyCaption);
}

TEST_CASE("property: provenance spans reproduce trimmed captions and never overlap") {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces{"a dog", " runs ", "fast", "!", "?", ".", "\ta cat", "é"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Caption> caps;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      std::string text;
      const int parts = 1 + static_cast<int>(rng() % 3);
      for (int p = 0; p < parts; ++p) text += pieces[rng() % pieces.size()];
      if (trim(text).empty()) text += "x";
      caps.push_back({static_cast<std::size_t>(i), text, {}, ""});
    }
    auto doc = assemble_document(caps);
    REQUIRE(doc.provenance.size() == caps.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < caps.size(); ++i) {
      const auto& span = doc.provenance[i];
      CHECK(span.offset >= cursor);
      CHECK(doc.text.substr(span.offset, span.length) == trim(caps[i].text));
      cursor = span.offset + span.length;
    }
  }
}

TEST_CASE("http request body is bit-exact") {
  auto k = keyframe(7, 3);
  auto body = HttpCaptionBackend::request_body(k);
  const std::string expected_prefix = R"({"id":"7","width":4,"height":2,"format":"png-base64","data":")";
  CHECK(body.substr(0, expected_prefix.size()) == expected_prefix);
  auto parsed = nlohmann::json::parse(body);
  auto decoded = base64_decode(parsed["data"].get<std::string>());
  REQUIRE(decoded);
  CHECK(*decoded == k.image_payload);
}

TEST_CASE("http response parsing") {
  auto r = HttpCaptionBackend::parse_response(R"({"caption": " a cat. ", "score": 0.75})");
  CHECK(r.text == "a cat.");
  CHECK(r.score == 0.75);
  CHECK_FALSE(HttpCaptionBackend::parse_response(R"({"caption": "x"})").score);
  CHECK(code_of([] { HttpCaptionBackend::parse_response("nope"); }) == ErrorCode::kBadResponse);
  CHECK(code_of([] { HttpCaptionBackend::parse_response(R"({"text": "x"})"); }) ==
        ErrorCode::kBadResponse);
  CHECK(code_of([] { HttpCaptionBackend::parse_response(R"({"caption": 3})"); }) ==
        ErrorCode::kBadResponse);
  CHECK(code_of([] { HttpCaptionBackend::parse_response(R"({"caption": "x", "score": "hi"})"); }) ==
        ErrorCode::kBadResponse);
  CHECK(code_of([] { HttpCaptionBackend::parse_response(R"({"caption": "x", "score": 1.5})"); }) ==
        ErrorCode::kBadResponse);
  CHECK(code_of([] { HttpCaptionBackend::parse_response(R"({"caption": "  "})"); }) ==
        ErrorCode::kEmptyCaption);
}

TEST_CASE("http backend: retries with doubling backoff, then BackendUnreachable") {
  auto transport = std::make_shared<RecordingTransport>(
      std::vector<std::optional<HttpResponse>>{std::nullopt});
  SleepLog log;
  HttpCaptionBackend backend("http://127.0.0.1:9", RetryPolicy{}, transport,
                             std::make_shared<CaptionCache>(), log.sleeper());
  CHECK(code_of([&] { backend.caption(keyframe(0)); }) == ErrorCode::kBackendUnreachable);
  CHECK(transport->calls == 4);
  CHECK(log.waits == std::vector<std::chrono::milliseconds>{250ms, 500ms, 1000ms});
  CHECK(transport->urls.front() == "http://127.0.0.1:9/v1/caption");
}

TEST_CASE("http backend: transient failures recover") {
  auto transport = std::make_shared<RecordingTransport>(std::vector<std::optional<HttpResponse>>{
      std::nullopt, HttpResponse{503, ""}, ok("a horse.")});
  SleepLog log;
  HttpCaptionBackend backend("http://h:1/base/", RetryPolicy{}, transport,
                             std::make_shared<CaptionCache>(), log.sleeper());
  auto c = backend.caption(keyframe(4));
  CHECK(c.text == "a horse.");
  CHECK(c.frame_index == 4);
  CHECK(c.backend_id == "http:http://h:1/base/");
  CHECK(transport->calls == 3);
  CHECK(transport->urls.front() == "http://h:1/base/v1/caption");
}

TEST_CASE("http backend: non-retryable status is BadResponse without retry") {
  auto transport = std::make_shared<RecordingTransport>(
      std::vector<std::optional<HttpResponse>>{HttpResponse{404, "missing"}});
  SleepLog log;
  HttpCaptionBackend backend("http://h:1", RetryPolicy{}, transport,
                             std::make_shared<CaptionCache>(), log.sleeper());
  CHECK(code_of([&] { backend.caption(keyframe(0)); }) == ErrorCode::kBadResponse);
  CHECK(transport->calls == 1);
  CHECK(log.waits.empty());
}

TEST_CASE("http backend: persistent 5xx ends as BadResponse") {
  auto transport = std::make_shared<RecordingTransport>(
      std::vector<std::optional<HttpResponse>>{HttpResponse{500, ""}});
  SleepLog log;
  RetryPolicy policy;
  policy.max_retries = 1;
  HttpCaptionBackend backend("http://h:1", policy, transport, std::make_shared<CaptionCache>(),
                             log.sleeper());
  CHECK(code_of([&] { backend.caption(keyframe(0)); }) == ErrorCode::kBadResponse);
  CHECK(transport->calls == 2);
}

TEST_CASE("cache coherence: same payload is fetched once, even concurrently") {
  auto transport = std::make_shared<RecordingTransport>(
      std::vector<std::optional<HttpResponse>>{ok("a cat.")});
  HttpCaptionBackend backend("http://h:1", RetryPolicy{}, transport,
                             std::make_shared<CaptionCache>(), [](auto) {});
  // Same pixels, different frame indices: the payload hash is identical.
  std::vector<Keyframe> frames;
  for (std::size_t i = 0; i < 16; ++i) frames.push_back(keyframe(i, 42));
  auto caps = caption_keyframes(backend, frames, 8);
  CHECK(transport->calls == 1);
  REQUIRE(caps.size() == 16);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    CHECK(caps[i].frame_index == i);
    CHECK(caps[i].text == "a cat.");
  }
  backend.caption(keyframe(99, 42));
  CHECK(transport->calls == 1);
  backend.caption(keyframe(99, 43));
  CHECK(transport->calls == 2);
}

TEST_CASE("cache directory persists across backend instances") {
  fixture::TempDir dir;
  auto transport = std::make_shared<RecordingTransport>(
      std::vector<std::optional<HttpResponse>>{HttpResponse{200, R"({"caption":"a kite.","score":0.5})"}});
  {
    HttpCaptionBackend backend("http://h:1", RetryPolicy{}, transport,
                               std::make_shared<CaptionCache>(dir.path()), [](auto) {});
    backend.caption(keyframe(0, 9));
  }
  CHECK(transport->calls == 1);
  HttpCaptionBackend again("http://h:1", RetryPolicy{}, transport,
                           std::make_shared<CaptionCache>(dir.path()), [](auto) {});
  auto c = again.caption(keyframe(3, 9));
  CHECK(transport->calls == 1);
  CHECK(c.text == "a kite.");
  CHECK(c.score == 0.5);
  CHECK(c.frame_index == 3);

  // Different endpoint, different backend id: not shared.
  HttpCaptionBackend other("http://h:2", RetryPolicy{}, transport,
                           std::make_shared<CaptionCache>(dir.path()), [](auto) {});
  other.caption(keyframe(3, 9));
  CHECK(transport->calls == 2);
}

TEST_CASE("caption_keyframes keeps frame order when responses arrive out of order") {
  class SlowFirst : public CaptionBackend {
   public:
    const std::string& id() const override { return id_; }
    Caption caption(const Keyframe& k) override {
      // Earlier frames answer later.
      std::this_thread::sleep_for(std::chrono::milliseconds(5 * (8 - k.frame_index)));
      return {k.frame_index, "frame " + std::to_string(k.frame_index), {}, id_};
    }
    std::string id_ = "slow";
  } backend;
  std::vector<Keyframe> frames;
  for (std::size_t i = 0; i < 8; ++i) frames.push_back(keyframe(i, static_cast<std::uint8_t>(i)));
  auto caps = caption_keyframes(backend, frames, 4);
  for (std::size_t i = 0; i < 8; ++i) CHECK(caps[i].text == "frame " + std::to_string(i));
}

TEST_CASE("caption_keyframes rethrows the earliest failure") {
  ScriptedBackend backend({{0, "zero"}, {2, "two"}});
  std::vector<Keyframe> frames{keyframe(0), keyframe(1), keyframe(2), keyframe(3)};
  try {
    caption_keyframes(backend, frames, 3);
    FAIL("expected ManifestMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kManifestMiss);
    CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
  }
}

TEST_CASE("backend spec validation") {
  BackendSpec http;
  http.kind = BackendKind::kHttp;
  CHECK(code_of([&] { http.validate(); }) == ErrorCode::kInvalidConfig);
  BackendSpec scripted;
  scripted.kind = BackendKind::kScriptedMock;
  CHECK(code_of([&] { scripted.validate(); }) == ErrorCode::kInvalidConfig);
  BackendSpec zero;
  zero.parallelism = 0;
  CHECK(code_of([&] { zero.validate(); }) == ErrorCode::kInvalidConfig);
  CHECK(code_of([] { join_endpoint("https://secure", ""); }) == ErrorCode::kInvalidConfig);
  CHECK(join_endpoint("http://a:1/x/", "/v1/caption").path == "/x/v1/caption");
}

TEST_CASE("http backend against a live loopback server") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::mutex mu;
  nlohmann::json last_request;
  server.Post("/v1/caption", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    auto body = nlohmann::json::parse(req.body);
    {
      std::lock_guard lock(mu);
      last_request = body;
    }
    auto png = base64_decode(body["data"].get<std::string>());
    nlohmann::json out = {{"caption", "frame " + body["id"].get<std::string>() + " of " +
                                          std::to_string(png ? png->size() : 0) + " bytes"},
                          {"score", 0.25}};
    res.set_content(out.dump(), "application/json");
  });
  server.Post("/broken/v1/caption", [](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content("{\"words\": []}", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string endpoint = "http://127.0.0.1:" + std::to_string(port);
  BackendSpec spec;
  spec.kind = BackendKind::kHttp;
  spec.endpoint = endpoint;
  auto backend = make_caption_backend(spec);
  std::vector<Keyframe> frames{keyframe(0, 1), keyframe(5, 2), keyframe(9, 1)};
  auto caps = caption_keyframes(*backend, frames, 2);
  REQUIRE(caps.size() == 3);
  CHECK(caps[1].text.starts_with("frame 5 of "));
  CHECK(caps[1].score == 0.25);
  CHECK(hits.load() == 2);  // frames 0 and 9 share a payload
  {
    std::lock_guard lock(mu);
    CHECK(last_request["format"] == "png-base64");
    CHECK(last_request["width"] == 4);
    CHECK(last_request["height"] == 2);
  }

  spec.endpoint = endpoint + "/broken";
  auto broken = make_caption_backend(spec);
  CHECK(code_of([&] { broken->caption(keyframe(1)); }) == ErrorCode::kBadResponse);

  server.stop();
  thread.join();
}
