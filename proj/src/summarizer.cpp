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

#include "clipscribe/summarizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clipscribe/captioner.hpp"
#include "clipscribe/error.hpp"

namespace clipscribe {

namespace detail {
extern const std::string_view kBundledStopwords;
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

const StopwordSet& bundled_stopwords() {
  static const StopwordSet set = parse_stopwords(detail::kBundledStopwords);
  return set;
}

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto word = trim(text.substr(pos, nl - pos));
    if (!word.empty() && word.front() != '#') {
      std::transform(word.begin(), word.end(), word.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      out.insert(std::move(word));
    }
    pos = nl + 1;
  }
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open stop-word list " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stopwords(ss.str());
}

std::vector<std::string> tokenize(std::string_view raw, const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : raw) {
    if (is_word_char(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_sentence_texts(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto frag = trim(text.substr(start, end - start));
    if (!frag.empty()) out.push_back(std::move(frag));
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
      emit(i);
      start = i + 1;
    }
  }
  if (start < text.size()) emit(text.size());
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text, const StopwordSet& stopwords) {
  std::vector<Sentence> out;
  for (auto& raw : split_sentence_texts(text)) {
    Sentence s;
    s.index = out.size();
    s.tokens = tokenize(raw, stopwords);
    s.raw = std::move(raw);
    out.push_back(std::move(s));
  }
  return out;
}

double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string_view, std::pair<double, double>> counts;
  for (const auto& t : a) counts[t].first += 1.0;
  for (const auto& t : b) counts[t].second += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [_, c] : counts) {
    dot += c.first * c.second;
    na += c.first * c.first;
    nb += c.second * c.second;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

SimilarityMatrix build_similarity_matrix(std::span<const Sentence> sentences) {
  const auto n = sentences.size();
  SimilarityMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = sentence_similarity(sentences[i].tokens, sentences[j].tokens);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

void SummarizerConfig::validate() const {
  if (top_n < 1) throw Error(ErrorCode::kInvalidConfig, "top-n must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "damping must lie in (0, 1)");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorCode::kInvalidConfig, "tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::kInvalidConfig, "max iterations must be >= 1");
}

StopwordSet SummarizerConfig::load_stopword_set() const {
  return stopwords ? load_stopwords(*stopwords) : bundled_stopwords();
}

RankScores rank_sentences(const SimilarityMatrix& m, const SummarizerConfig& config) {
  const auto n = m.size();
  RankScores out;
  if (n == 0) return out;

  // Out-weight matrix, row-stochastic.
  std::vector<double> p(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += m(i, j);
    for (std::size_t j = 0; j < n; ++j) {
      p[i * n + j] = row > 0.0 ? m(i, j) / row : 1.0 / static_cast<double>(n);
    }
  }

  const double d = config.damping;
  const double teleport = (1.0 - d) / static_cast<double>(n);
  std::vector<double> r(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  while (out.iterations < config.max_iterations) {
    std::fill(next.begin(), next.end(), teleport);
    for (std::size_t j = 0; j < n; ++j) {
      const double share = d * r[j];
      for (std::size_t i = 0; i < n; ++i) next[i] += share * p[j * n + i];
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - r[i]);
    r.swap(next);
    ++out.iterations;
    if (change < config.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.values = std::move(r);
  return out;
}

std::vector<std::size_t> top_ranked(std::span<const double> scores, std::size_t count) {
  std::vector<std::size_t> remaining(scores.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> out;
  count = std::min(count, scores.size());
  while (out.size() < count) {
    double best = -INFINITY;
    for (auto i : remaining) best = std::max(best, scores[i]);
    // `remaining` stays in index order, so the first near-maximum is the
    // lowest index among the tied.
    auto it = std::find_if(remaining.begin(), remaining.end(), [&](std::size_t i) {
      return scores[i] >= best - kScoreTieEpsilon;
    });
    out.push_back(*it);
    remaining.erase(it);
  }
  return out;
}

std::string title(std::span<const Sentence> sentences, std::span<const double> scores) {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyDocument, "document has no sentences");
  if (sentences.size() != scores.size()) {
    throw Error(ErrorCode::kInvalidConfig, "score count does not match sentence count");
  }
  return sentences[top_ranked(scores, 1).front()].raw;
}

std::string extract_summary(std::span<const Sentence> sentences, std::span<const double> scores,
                            std::size_t n) {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyDocument, "document has no sentences");
  if (sentences.size() != scores.size()) {
    throw Error(ErrorCode::kInvalidConfig, "score count does not match sentence count");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidConfig, "summary length must be >= 1");
  auto picked = top_ranked(scores, n);
  std::sort(picked.begin(), picked.end());
  std::string out;
  for (auto i : picked) {
    if (!out.empty()) out += ". ";
    out += sentences[i].raw;
  }
  out += '.';
  return out;
}

Summary summarize(std::string_view document, const SummarizerConfig& config,
                  const StopwordSet& stopwords) {
  config.validate();
  Summary s;
  s.sentences = split_sentences(document, stopwords);
  if (s.sentences.empty()) throw Error(ErrorCode::kEmptyDocument, "document has no sentences");
  s.similarity = build_similarity_matrix(s.sentences);
  s.scores = rank_sentences(s.similarity, config);
  s.title = title(s.sentences, s.scores.values);
  s.extractive = extract_summary(s.sentences, s.scores.values, config.top_n);
  return s;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::string_view abstract_kind_name(AbstractKind k) {
  return k == AbstractKind::kAbstractive ? "abstractive" : "extractive_fallback";
}

void AbstractSpec::validate() const {
  if (backend == Backend::kHttp && (!endpoint || endpoint->empty())) {
    throw Error(ErrorCode::kInvalidConfig, "http abstract backend requires an endpoint");
  }
  if (max_words < 1) throw Error(ErrorCode::kInvalidConfig, "max words must be >= 1");
}

std::size_t fallback_sentence_count(std::span<const Sentence> sentences,
                                    std::span<const double> scores, std::size_t document_words,
                                    std::size_t max_words) {
  const double target = static_cast<double>(std::min(max_words, document_words)) / 2.0;
  for (std::size_t n = 1; n < sentences.size(); ++n) {
    if (static_cast<double>(word_count(extract_summary(sentences, scores, n))) >= target) {
      return n;
    }
  }
  return sentences.size();
}

AbstractResult abstract_via_backend(const std::string& document, const AbstractSpec& spec,
                                    const SummarizerConfig& config, const StopwordSet& stopwords,
                                    std::shared_ptr<HttpTransport> transport, Sleeper sleep) {
  spec.validate();
  if (trim(document).empty()) throw Error(ErrorCode::kEmptyDocument, "document is empty");

  if (spec.backend == AbstractSpec::Backend::kHttp) {
    if (!transport) transport = make_default_transport();
    auto url = join_endpoint(*spec.endpoint, "/v1/summarize");
    nlohmann::ordered_json req;
    req["text"] = document;
    req["max_words"] = spec.max_words;
    RetryPolicy policy;
    policy.max_retries = spec.max_retries;
    policy.timeout = std::chrono::milliseconds(spec.timeout_ms);
    auto res = post_with_retry(*transport, url.scheme_host_port + url.path, req.dump(), policy,
                               sleep);
    auto doc = nlohmann::json::parse(res.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("summary") ||
        !doc["summary"].is_string()) {
      throw Error(ErrorCode::kBadResponse, "summarize response lacks a string 'summary'");
    }
    auto summary = doc["summary"].get<std::string>();
    if (trim(summary).empty()) throw Error(ErrorCode::kBadResponse, "blank summary");
    return {std::move(summary), AbstractKind::kAbstractive};
  }

  config.validate();
  auto sentences = split_sentences(document, stopwords);
  if (sentences.empty()) throw Error(ErrorCode::kEmptyDocument, "document has no sentences");
  auto scores = rank_sentences(build_similarity_matrix(sentences), config);
  auto n = fallback_sentence_count(sentences, scores.values, word_count(document),
                                   spec.max_words);
  return {extract_summary(sentences, scores.values, n), AbstractKind::kExtractiveFallback};
}

}  // namespace clipscribe
