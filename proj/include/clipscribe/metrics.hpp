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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clipscribe {

using Tokens = std::vector<std::string>;
using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

/// Summarizer tokenization without stop-word removal.
Tokens metric_tokens(std::string_view text);

/// Multiset of contiguous n-grams; empty when the sequence is shorter than n.
NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n);

struct BleuBreakdown {
  double score = 0.0;
  std::vector<std::size_t> clipped_matches;  // per order 1..max_n
  std::vector<std::size_t> candidate_ngrams;
  double brevity_penalty = 1.0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;  // closest to candidate; ties to shorter
};

/// Sentence BLEU: clipped n-gram precisions combined by uniform geometric
/// mean, times the brevity penalty. No smoothing, so any zero precision
/// yields 0. Throws EmptyCandidate / EmptyReferences.
BleuBreakdown bleu_breakdown(std::span<const std::string> candidate,
                             std::span<const Tokens> references, std::size_t max_n = 4);
double bleu(std::span<const std::string> candidate, std::span<const Tokens> references,
            std::size_t max_n = 4);

struct CiderItem {
  std::string id;
  Tokens candidate;
  std::vector<Tokens> references;
};

struct CiderResult {
  std::vector<double> scores;  // parallel to the input items
  double mean = 0.0;
};

/// Plain CIDEr: per order n, TF-IDF vectors with raw counts as tf and
/// idf = ln|I| - ln(max(1, document frequency over reference sets)); the
/// item score averages candidate/reference cosines over references, then
/// over orders. No length penalty and no x10 scaling, so scores lie in
/// [0, 1]. Throws CorpusTooSmall / EmptyCandidate / EmptyReferences.
CiderResult cider(std::span<const CiderItem> items, std::size_t max_n = 4);

}  // namespace clipscribe
