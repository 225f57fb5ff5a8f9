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
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace clipscribe {

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Minimal JSON-over-HTTP POST. Implementations must be callable from
/// several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// nullopt when no response was received (connect failure, timeout).
  virtual std::optional<HttpResponse> post_json(const std::string& url, const std::string& body,
                                                std::chrono::milliseconds timeout) = 0;
};

/// Plain-http transport backed by cpp-httplib.
std::shared_ptr<HttpTransport> make_default_transport();

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path;              // always starts with '/'
};

/// Splits "http://host[:port][/prefix]" and appends `suffix` to the path.
/// Throws Error(kInvalidConfig) for anything but plain http.
ParsedUrl join_endpoint(const std::string& endpoint, const std::string& suffix);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{250};
  std::chrono::milliseconds timeout{10000};
};

/// POSTs with exponential backoff (base_delay, doubling). Missing responses,
/// 429 and 5xx are retried; after the last attempt a missing response is
/// BackendUnreachable and a bad status is BadResponse. Any other non-200
/// status fails immediately with BadResponse.
HttpResponse post_with_retry(HttpTransport& transport, const std::string& url,
                             const std::string& body, const RetryPolicy& policy,
                             const Sleeper& sleep);

/// Sleeper that blocks the calling thread.
Sleeper real_sleeper();

}  // namespace clipscribe
