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
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clipscribe/transport.hpp"

namespace clipscribe {

using StopwordSet = std::unordered_set<std::string>;

/// The English list shipped in data/stopwords_en.txt.
const StopwordSet& bundled_stopwords();

/// One word per line; blank lines and lines starting with '#' are skipped.
StopwordSet parse_stopwords(std::string_view text);
StopwordSet load_stopwords(const std::filesystem::path& path);

struct Sentence {
  std::size_t index = 0;
  std::string raw;
  std::vector<std::string> tokens;
};

/// Lowercases, splits on runs of non-alphanumeric ASCII, drops stop words.
/// Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view raw, const StopwordSet& stopwords);

/// Splits at '.', '!' or '?' followed by whitespace or end of text. Fragments
/// are trimmed; empty ones are discarded.
std::vector<std::string> split_sentence_texts(std::string_view text);
std::vector<Sentence> split_sentences(std::string_view text, const StopwordSet& stopwords);

/// Cosine similarity of token count vectors; 0 when either side is empty.
double sentence_similarity(std::span<const std::string> a, std::span<const std::string> b);

/// Dense symmetric n x n matrix with zero diagonal and entries in [0, 1].
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

SimilarityMatrix build_similarity_matrix(std::span<const Sentence> sentences);

struct SummarizerConfig {
  std::size_t top_n = 3;
  double damping = 0.85;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
  std::optional<std::filesystem::path> stopwords;  // bundled list when unset

  void validate() const;
  StopwordSet load_stopword_set() const;
};

struct RankScores {
  std::vector<double> values;
  std::size_t iterations = 0;
  bool converged = false;
};

/// PageRank-style power iteration. Rows of `m` are normalized into
/// out-weights (an all-zero row spreads uniformly over all n sentences) and
/// r <- d * P^T r + (1 - d) / n is iterated from the uniform vector until the
/// L1 change drops below the tolerance or max_iterations is reached.
RankScores rank_sentences(const SimilarityMatrix& m, const SummarizerConfig& config);

/// Scores closer than this are treated as tied; ties go to the lower index.
inline constexpr double kScoreTieEpsilon = 1e-12;

/// Indices of the min(n, count) best scores, best first.
std::vector<std::size_t> top_ranked(std::span<const double> scores, std::size_t count);

/// Raw text of the best-scoring sentence. Throws EmptyDocument.
std::string title(std::span<const Sentence> sentences, std::span<const double> scores);

/// Best `n` sentences re-emitted in document order, joined by ". " and
/// terminated with ".". Throws EmptyDocument.
std::string extract_summary(std::span<const Sentence> sentences, std::span<const double> scores,
                            std::size_t n);

struct Summary {
  std::vector<Sentence> sentences;
  SimilarityMatrix similarity;
  RankScores scores;
  std::string title;
  std::string extractive;
};

/// split -> similarity matrix -> rank -> title + top-N extract.
Summary summarize(std::string_view document, const SummarizerConfig& config,
                  const StopwordSet& stopwords);

std::size_t word_count(std::string_view text);

enum class AbstractKind { kAbstractive, kExtractiveFallback };
std::string_view abstract_kind_name(AbstractKind k);

struct AbstractSpec {
  enum class Backend { kHttp, kFallback } backend = Backend::kFallback;
  std::optional<std::string> endpoint;
  std::size_t max_words = 60;
  int timeout_ms = 10000;
  int max_retries = 3;

  void validate() const;
};

struct AbstractResult {
  std::string text;
  AbstractKind kind = AbstractKind::kExtractiveFallback;
};

/// Smallest N whose extract has at least min(max_words, document words) / 2
/// words.
std::size_t fallback_sentence_count(std::span<const Sentence> sentences,
                                    std::span<const double> scores, std::size_t document_words,
                                    std::size_t max_words);

/// Abstract from POST {endpoint}/v1/summarize, or the labeled extractive
/// stand-in when the fallback backend is selected.
AbstractResult abstract_via_backend(const std::string& document, const AbstractSpec& spec,
                                    const SummarizerConfig& config, const StopwordSet& stopwords,
                                    std::shared_ptr<HttpTransport> transport = nullptr,
                                    Sleeper sleep = real_sleeper());

}  // namespace clipscribe
