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

#include "clipscribe/transport.hpp"

#include <httplib.h>

#include <thread>

#include "clipscribe/error.hpp"

namespace clipscribe {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  std::optional<HttpResponse> post_json(const std::string& url, const std::string& body,
                                        std::chrono::milliseconds timeout) override {
    auto parsed = join_endpoint(url, "");
    httplib::Client client(parsed.scheme_host_port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(parsed.path, body, "application/json");
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  }
};

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::shared_ptr<HttpTransport> make_default_transport() {
  return std::make_shared<HttplibTransport>();
}

ParsedUrl join_endpoint(const std::string& endpoint, const std::string& suffix) {
  constexpr std::string_view kScheme = "http://";
  if (!endpoint.starts_with(kScheme)) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint must be an http:// URL: " + endpoint);
  }
  auto slash = endpoint.find('/', kScheme.size());
  ParsedUrl out;
  out.scheme_host_port = endpoint.substr(0, slash);
  if (out.scheme_host_port.size() == kScheme.size()) {
    throw Error(ErrorCode::kInvalidConfig, "endpoint has no host: " + endpoint);
  }
  std::string prefix = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  out.path = prefix + suffix;
  if (out.path.empty()) out.path = "/";
  return out;
}

HttpResponse post_with_retry(HttpTransport& transport, const std::string& url,
                             const std::string& body, const RetryPolicy& policy,
                             const Sleeper& sleep) {
  auto delay = policy.base_delay;
  std::optional<HttpResponse> last;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempt > 0) {
      sleep(delay);
      delay *= 2;
    }
    last = transport.post_json(url, body, policy.timeout);
    if (last && last->status == 200) return *last;
    if (last && !retryable(last->status)) break;
  }
  if (!last) {
    throw Error(ErrorCode::kBackendUnreachable,
                url + " unreachable after " + std::to_string(policy.max_retries + 1) +
                    " attempts");
  }
  throw Error(ErrorCode::kBadResponse, url + " returned HTTP " + std::to_string(last->status));
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

}  // namespace clipscribe
