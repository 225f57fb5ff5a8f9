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

#include <algorithm>
#include <cmath>
#include <random>

#include "clipscribe/error.hpp"
#include "clipscribe/metrics.hpp"
#include "support/bleu_cases.hpp"
#include "support/oracles.hpp"

using namespace clipscribe;

namespace {

std::vector<Tokens> tokens_of(const std::vector<std::string>& texts) {
  std::vector<Tokens> out;
  for (const auto& t : texts) out.push_back(metric_tokens(t));
  return out;
}

Ngram gram(std::initializer_list<const char*> words) {
  return Ngram(words.begin(), words.end());
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

std::vector<CiderItem> toy_corpus() {
  return {
      {"A", metric_tokens("a man rides a horse"),
       tokens_of({"a man rides a brown horse", "a person on a horse"})},
      {"B", metric_tokens("a dog runs on the beach"), tokens_of({"a dog runs along the beach"})},
      {"C", metric_tokens("a cat sits on a couch"),
       tokens_of({"a cat sleeps on a couch", "a kitten on the sofa"})},
  };
}

}  // namespace

TEST_CASE("metric tokens keep stop words") {
  CHECK(metric_tokens("The cat, on THE mat!") ==
        Tokens{"the", "cat", "on", "the", "mat"});
}

TEST_CASE("ngram_counts") {
  Tokens aba{"a", "b", "a"};
  auto one = ngram_counts(aba, 1);
  CHECK(one.size() == 2);
  CHECK(one.at(gram({"a"})) == 2);
  CHECK(one.at(gram({"b"})) == 1);
  CHECK(ngram_counts(Tokens{"a", "b"}, 3).empty());
  auto two = ngram_counts(Tokens{"a", "b", "a", "b"}, 2);
  CHECK(two.size() == 2);
  CHECK(two.at(gram({"a", "b"})) == 2);
  CHECK(two.at(gram({"b", "a"})) == 1);
}

TEST_CASE("bleu: worked examples") {
  auto identity = bleu_breakdown(metric_tokens("the cat is on the mat"),
                                 tokens_of({"the cat is on the mat"}));
  CHECK(identity.score == 1.0);

  auto clipped = bleu_breakdown(metric_tokens("the the the the the the the"),
                                tokens_of({"the cat is on the mat"}));
  CHECK(clipped.clipped_matches[0] == 2);
  CHECK(clipped.candidate_ngrams[0] == 7);
  CHECK(clipped.clipped_matches[1] == 0);
  CHECK(clipped.score == 0.0);

  // c = 3, r = 6 with every order up to 3 matched.
  auto short_cand = bleu_breakdown(metric_tokens("a b c"), tokens_of({"a b c d e f"}), 3);
  CHECK(short_cand.brevity_penalty == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(short_cand.score == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  // Closest reference length, ties to the shorter one.
  auto tie = bleu_breakdown(metric_tokens("a b c d e"), tokens_of({"a b c d e f", "a b c d"}));
  CHECK(tie.reference_length == 4);
  CHECK(tie.brevity_penalty == 1.0);

  CHECK(code_of([] { bleu(Tokens{}, tokens_of({"a"})); }) == ErrorCode::kEmptyCandidate);
  CHECK(code_of([] { bleu(Tokens{"a"}, std::vector<Tokens>{}); }) ==
        ErrorCode::kEmptyReferences);
}

TEST_CASE("bleu: hand cases agree with the brute-force counter") {
  for (const auto& c : fixture::bleu_cases()) {
    CAPTURE(c.candidate);
    const auto cand = metric_tokens(c.candidate);
    const auto refs = tokens_of(c.references);
    const double got = bleu(cand, refs);
    CHECK(got == oracle::bleu(cand, refs));
    if (c.expected >= 0.0) CHECK(got == c.expected);
  }
}

TEST_CASE("property: bleu bounds, permutation, identity, clipping monotonicity") {
  std::mt19937 rng(3);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  auto sentence = [&](std::size_t min_len) {
    Tokens t(min_len + rng() % 6);
    for (auto& w : t) w = vocab[rng() % vocab.size()];
    return t;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto cand = sentence(1);
    std::vector<Tokens> refs;
    for (std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k) refs.push_back(sentence(1));

    const auto base = bleu_breakdown(cand, refs);
    CHECK(base.score >= 0.0);
    CHECK(base.score <= 1.0);
    CHECK(base.score == oracle::bleu(cand, refs));

    auto shuffled = refs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(bleu(cand, shuffled) == base.score);

    auto extended = refs;
    extended.push_back(sentence(1));
    const auto more = bleu_breakdown(cand, extended);
    for (std::size_t n = 0; n < 4; ++n) CHECK(more.clipped_matches[n] >= base.clipped_matches[n]);

    auto with_copy = refs;
    with_copy.push_back(cand);
    if (cand.size() >= 4) CHECK(bleu(cand, with_copy) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("cider: frozen toy corpus") {
  auto items = toy_corpus();
  auto r = cider(items);
  // Values from tests/oracles/freeze_values.py.
  CHECK(r.scores[0] == doctest::Approx(0.399974900037370).epsilon(1e-12));
  CHECK(r.scores[1] == doctest::Approx(0.425612636342642).epsilon(1e-12));
  CHECK(r.scores[2] == doctest::Approx(0.187329188109430).epsilon(1e-12));
  CHECK(r.mean == doctest::Approx((r.scores[0] + r.scores[1] + r.scores[2]) / 3.0));

  std::vector<Tokens> cands;
  std::vector<std::vector<Tokens>> refs;
  for (const auto& it : items) {
    cands.push_back(it.candidate);
    refs.push_back(it.references);
  }
  auto expected = oracle::cider(cands, refs);
  for (std::size_t i = 0; i < items.size(); ++i) CHECK(std::abs(r.scores[i] - expected[i]) < 1e-12);
}

TEST_CASE("cider: trivial cases and errors") {
  std::vector<CiderItem> self{
      {"x", metric_tokens("a red ball bounces high"), tokens_of({"a red ball bounces high"})},
      {"y", metric_tokens("two cats sleep inside today"), tokens_of({"two cats sleep inside today"})},
  };
  auto r = cider(self);
  CHECK(r.scores[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.scores[1] == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<CiderItem> disjoint{
      {"x", metric_tokens("green tree"), tokens_of({"blue sky"})},
      {"y", metric_tokens("red car"), tokens_of({"fast bike"})},
  };
  CHECK(cider(disjoint).scores[0] == 0.0);

  CHECK(code_of([&] { cider(std::span(self).first(1)); }) == ErrorCode::kCorpusTooSmall);
  auto empty = self;
  empty[0].candidate.clear();
  CHECK(code_of([&] { cider(empty); }) == ErrorCode::kEmptyCandidate);
}

TEST_CASE("cider: n-grams present in every item's references contribute nothing") {
  // "on" appears in every reference set, so idf("on") = 0 at n = 1.
  std::vector<CiderItem> items{
      {"A", metric_tokens("on"), tokens_of({"cat on mat"})},
      {"B", metric_tokens("on"), tokens_of({"dog on rug"})},
      {"C", metric_tokens("on"), tokens_of({"hat on head"})},
  };
  auto r = cider(items);
  for (double s : r.scores) CHECK(s == 0.0);

  // Adding a shared word to both candidate and references leaves the unigram
  // term equal to the same computation with that word removed.
  auto with_shared = toy_corpus();
  for (auto& it : with_shared) {
    it.candidate.insert(it.candidate.begin(), "zz");
    for (auto& ref : it.references) ref.insert(ref.begin(), "zz");
  }
  auto without = toy_corpus();
  auto a = cider(with_shared, 1);
  auto b = cider(without, 1);
  for (std::size_t i = 0; i < a.scores.size(); ++i)
    CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-12));
}

TEST_CASE("property: cider matches the oracle and ignores reference order") {
  std::mt19937 rng(9);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g"};
  auto sentence = [&] {
    Tokens t(1 + rng() % 6);
    for (auto& w : t) w = vocab[rng() % vocab.size()];
    return t;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CiderItem> items(2 + rng() % 4);
    std::vector<Tokens> cands;
    std::vector<std::vector<Tokens>> refs;
    for (std::size_t i = 0; i < items.size(); ++i) {
      items[i].id = std::to_string(i);
      items[i].candidate = sentence();
      for (std::size_t k = 0, m = 1 + rng() % 3; k < m; ++k) items[i].references.push_back(sentence());
      cands.push_back(items[i].candidate);
      refs.push_back(items[i].references);
    }
    auto r = cider(items);
    auto expected = oracle::cider(cands, refs);
    for (std::size_t i = 0; i < items.size(); ++i) {
      CHECK(std::abs(r.scores[i] - expected[i]) < 1e-9);
      CHECK(r.scores[i] >= -1e-12);
      CHECK(r.scores[i] <= 1.0 + 1e-12);
    }
    for (auto& it : items) std::shuffle(it.references.begin(), it.references.end(), rng);
    auto permuted = cider(items);
    for (std::size_t i = 0; i < items.size(); ++i)
      CHECK(permuted.scores[i] == doctest::Approx(r.scores[i]).epsilon(1e-12));
  }
}
