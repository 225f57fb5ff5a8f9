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

#include "clipscribe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "clipscribe/error.hpp"
#include "clipscribe/summarizer.hpp"

namespace clipscribe {

Tokens metric_tokens(std::string_view text) {
  static const StopwordSet kNone;
  return tokenize(text, kNone);
}

NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts out;
  if (n == 0 || tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

BleuBreakdown bleu_breakdown(std::span<const std::string> candidate,
                             std::span<const Tokens> references, std::size_t max_n) {
  if (candidate.empty()) throw Error(ErrorCode::kEmptyCandidate, "candidate has no tokens");
  if (references.empty()) throw Error(ErrorCode::kEmptyReferences, "no references given");
  if (max_n < 1) throw Error(ErrorCode::kInvalidConfig, "max n-gram order must be >= 1");

  BleuBreakdown out;
  out.candidate_length = candidate.size();
  const auto c = candidate.size();
  out.reference_length = references.front().size();
  for (const auto& ref : references) {
    const auto r = ref.size();
    const auto best = out.reference_length;
    const auto dr = r > c ? r - c : c - r;
    const auto db = best > c ? best - c : c - best;
    if (dr < db || (dr == db && r < best)) out.reference_length = r;
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    auto cand = ngram_counts(candidate, n);
    NgramCounts max_ref;
    for (const auto& ref : references) {
      for (const auto& [g, k] : ngram_counts(ref, n)) {
        auto& slot = max_ref[g];
        slot = std::max(slot, k);
      }
    }
    std::size_t matched = 0, total = 0;
    for (const auto& [g, k] : cand) {
      total += k;
      if (auto it = max_ref.find(g); it != max_ref.end()) matched += std::min(k, it->second);
    }
    out.clipped_matches.push_back(matched);
    out.candidate_ngrams.push_back(total);
    if (matched == 0) {
      zero = true;
    } else {
      log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total)) /
                 static_cast<double>(max_n);
    }
  }

  const double r = static_cast<double>(out.reference_length);
  out.brevity_penalty = c > out.reference_length ? 1.0 : std::exp(1.0 - r / static_cast<double>(c));
  out.score = zero ? 0.0 : std::min(1.0, out.brevity_penalty * std::exp(log_sum));
  return out;
}

double bleu(std::span<const std::string> candidate, std::span<const Tokens> references,
            std::size_t max_n) {
  return bleu_breakdown(candidate, references, max_n).score;
}

namespace {

using Weights = std::map<Ngram, double>;

Weights tfidf(const NgramCounts& counts, const std::map<Ngram, std::size_t>& df,
              double log_items) {
  Weights w;
  for (const auto& [g, tf] : counts) {
    auto it = df.find(g);
    const double freq = it == df.end() ? 1.0 : static_cast<double>(std::max<std::size_t>(1, it->second));
    w[g] = static_cast<double>(tf) * (log_items - std::log(freq));
  }
  return w;
}

double cosine(const Weights& a, const Weights& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [g, v] : a) {
    na += v * v;
    if (auto it = b.find(g); it != b.end()) dot += v * it->second;
  }
  for (const auto& [_, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

CiderResult cider(std::span<const CiderItem> items, std::size_t max_n) {
  if (items.size() < 2) {
    throw Error(ErrorCode::kCorpusTooSmall, "CIDEr needs at least 2 items for document frequency");
  }
  if (max_n < 1) throw Error(ErrorCode::kInvalidConfig, "max n-gram order must be >= 1");
  for (const auto& item : items) {
    if (item.candidate.empty()) {
      throw Error(ErrorCode::kEmptyCandidate, "item " + item.id + " has an empty candidate");
    }
    const bool any = std::any_of(item.references.begin(), item.references.end(),
                                 [](const Tokens& t) { return !t.empty(); });
    if (!any) {
      throw Error(ErrorCode::kEmptyReferences, "item " + item.id + " has no non-empty reference");
    }
  }

  const double log_items = std::log(static_cast<double>(items.size()));
  CiderResult out;
  out.scores.assign(items.size(), 0.0);

  for (std::size_t n = 1; n <= max_n; ++n) {
    // Document frequency: number of items whose reference set contains g.
    std::map<Ngram, std::size_t> df;
    std::vector<std::vector<NgramCounts>> ref_counts(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::set<Ngram> seen;
      for (const auto& ref : items[i].references) {
        ref_counts[i].push_back(ngram_counts(ref, n));
        for (const auto& [g, _] : ref_counts[i].back()) seen.insert(g);
      }
      for (const auto& g : seen) ++df[g];
    }

    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto cand = tfidf(ngram_counts(items[i].candidate, n), df, log_items);
      double sum = 0.0;
      for (const auto& rc : ref_counts[i]) sum += cosine(cand, tfidf(rc, df, log_items));
      out.scores[i] += sum / static_cast<double>(ref_counts[i].size()) /
                       static_cast<double>(max_n);
    }
  }

  double total = 0.0;
  for (double s : out.scores) total += s;
  out.mean = total / static_cast<double>(items.size());
  return out;
}

}  // namespace clipscribe
