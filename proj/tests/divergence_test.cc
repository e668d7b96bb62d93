// Copyright 2026 The transportkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.h"
#include "test_util.h"
#include "transportkit/corpus.h"
#include "transportkit/csv.h"
#include "transportkit/divergence.h"
#include "transportkit/features.h"

namespace transportkit {
namespace {

using Set = std::set<std::string>;
using testing::ExpectError;

std::vector<double> RandomVector(testing::Lcg& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(-3.0, 3.0);
  return v;
}

DomainProfile Profile(const std::string& id,
                      const std::vector<std::string>& tokens,
                      const EmbeddingConfig& config = {}) {
  return BuildProfile(Corpus(id, {{tokens, tokens.size()}}, {}, {}), config);
}

TEST_CASE("lexical: reference examples") {
  CHECK(LexicalDifference(Set{"a", "b", "c"}, Set{"a", "b", "c"}) == 0.0);
  CHECK(LexicalDifference(Set{"a", "b"}, Set{"c", "d"}) == 1.0);
  CHECK(LexicalDifference(Set{"a", "b", "c"}, Set{"b", "c", "d", "e"}) == 0.5);
  // Asymmetry: the target vocabulary is the denominator.
  CHECK(LexicalDifference(Set{"a"}, Set{"a", "b"}) == 0.5);
  CHECK(LexicalDifference(Set{"a", "b"}, Set{"a"}) == 0.0);
  ExpectError([] { LexicalDifference(Set{"a"}, Set{}); }, ErrorKind::kUsage,
              "empty");
}

TEST_CASE("lexical: naive double loop oracle on random vocabularies") {
  testing::Lcg rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> a;
    std::vector<std::string> b;
    const auto na = 1 + rng.Below(12);
    const auto nb = 1 + rng.Below(12);
    for (unsigned i = 0; i < na; ++i) a.push_back("w" + std::to_string(rng.Below(15)));
    for (unsigned i = 0; i < nb; ++i) b.push_back("w" + std::to_string(rng.Below(15)));
    // Deduplicate for the oracle, preserving the naive loop.
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    const double expected =
        1.0 - static_cast<double>(oracle::NaiveIntersection(a, b)) /
                  static_cast<double>(b.size());
    const double got = LexicalDifference(Set(a.begin(), a.end()), Set(b.begin(), b.end()));
    CHECK(got == expected);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("cosine: identity, orthogonal and antipodal") {
  const std::vector<double> v{0.6, 0.8};
  const std::vector<double> w{-0.6, -0.8};
  const std::vector<double> o{-0.8, 0.6};
  CHECK(CosineDistance(v, v) == 0.0);
  CHECK(CosineDistance(v, o) == doctest::Approx(1.0));
  CHECK(CosineDistance(v, w) == doctest::Approx(2.0));
}

TEST_CASE("cosine: errors") {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{1.0, 0.0, 0.0};
  const std::vector<double> nan{NAN, 1.0};
  const std::vector<double> empty;
  ExpectError([&] { CosineDistance(a, b); }, ErrorKind::kUsage, "dimension");
  CHECK_THROWS_AS(CosineDistance(a, nan), Error);
  CHECK_THROWS_AS(CosineDistance(empty, empty), Error);
}

TEST_CASE("kl: two term hand value") {
  const std::vector<double> q{0.5, 0.5};
  const std::vector<double> p{0.9, 0.1};
  const double expected = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  CHECK(RelativeEntropy(q, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(RelativeEntropy(q, p) == doctest::Approx(0.5108256).epsilon(1e-6));
}

TEST_CASE("kl: conversion produces distributions") {
  const std::vector<double> v{-1.0, 0.0, 2.0};
  for (auto conv : {KlConversion::kShift, KlConversion::kSoftmax}) {
    const auto p = ToDistribution(v, conv, 1e-9);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x > 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto shift = ToDistribution(v, KlConversion::kShift, 1e-9);
  CHECK(shift[2] == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("kl: direction") {
  const std::vector<double> s{0.1, 0.5, 0.2};
  const std::vector<double> t{0.4, 0.1, 0.6};
  KlSettings fwd;
  KlSettings rev;
  rev.direction = KlDirection::kReverse;
  const auto ps = ToDistribution(s, KlConversion::kShift, 1e-9);
  const auto pt = ToDistribution(t, KlConversion::kShift, 1e-9);
  CHECK(KlDivergence(s, t, fwd) == doctest::Approx(RelativeEntropy(pt, ps)));
  CHECK(KlDivergence(s, t, rev) == doctest::Approx(RelativeEntropy(ps, pt)));
  CHECK(fwd.Hash() != rev.Hash());

  KlSettings bad;
  nlohmann::json j = bad;
  j["epsilon"] = 0.0;
  CHECK_THROWS_AS(j.get<KlSettings>(), Error);
}

TEST_CASE("divergence: property suite over random vector pairs") {
  testing::Lcg rng(31337);
  const int pairs = 10000;
  int kl_negative = 0;
  int raw_negative = 0;
  for (int i = 0; i < pairs; ++i) {
    const std::size_t n = 2 + rng.Below(40);
    std::vector<double> u = RandomVector(rng, n);
    std::vector<double> v = RandomVector(rng, n);
    KlSettings settings;
    if (i % 2 == 1) settings.conversion = KlConversion::kSoftmax;
    if (i % 3 == 1) settings.direction = KlDirection::kReverse;

    const double kl = KlDivergence(u, v, settings);
    if (!(kl >= 0.0)) ++kl_negative;
    CHECK(KlDivergence(u, u, settings) == 0.0);

    // The unclamped sum only dips below zero by rounding.
    const auto pu = ToDistribution(u, settings.conversion, settings.epsilon);
    const auto pv = ToDistribution(v, settings.conversion, settings.epsilon);
    if (RelativeEntropy(pv, pu) < -1e-15) ++raw_negative;

    CHECK(CosineDistance(u, v) == CosineDistance(v, u));
    Normalize(u);
    CHECK(CosineDistance(u, u) == 0.0);

    // Identical permutation of both arguments.
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    for (std::size_t k = n - 1; k > 0; --k) std::swap(perm[k], perm[rng.Below(static_cast<std::uint32_t>(k + 1))]);
    std::vector<double> up(n);
    std::vector<double> vp(n);
    for (std::size_t k = 0; k < n; ++k) {
      up[k] = u[perm[k]];
      vp[k] = v[perm[k]];
    }
    CHECK(std::abs(CosineDistance(up, vp) - CosineDistance(u, v)) <= 1e-12);
    CHECK(std::abs(KlDivergence(up, vp, settings) - KlDivergence(u, v, settings)) <= 1e-12);
  }
  CHECK(kl_negative == 0);
  CHECK(raw_negative == 0);
}

TEST_CASE("similarity: self, ordering and comparability") {
  const DomainProfile src = Profile("src", {"a", "b", "c"});
  const DomainProfile t1 = Profile("t1", {"b", "c", "d", "e"});
  const DomainProfile t2 = Profile("t2", {"x"});
  const DomainProfile t3 = Profile("t3", {"a"});

  const auto self = SimilarityTable(src, {src});
  REQUIRE(self.size() == 1);
  CHECK(self[0].lexical_difference == 0.0);
  CHECK(self[0].cosine_distance == 0.0);
  CHECK(self[0].kl_divergence == 0.0);

  const auto rows = SimilarityTable(src, {t1, t2, t3});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].target_id == "t1");
  CHECK(rows[1].target_id == "t2");
  CHECK(rows[2].target_id == "t3");
  CHECK(rows[0].lexical_difference == 0.5);
  CHECK(rows[1].lexical_difference == 1.0);
  CHECK(rows[2].lexical_difference == 0.0);

  SimilaritySettings with_self;
  with_self.include_self = true;
  const auto rows_self = SimilarityTable(src, {t1}, with_self);
  REQUIRE(rows_self.size() == 2);
  CHECK(rows_self[0].target_id == "src");

  EmbeddingConfig other;
  other.seed = 1;
  ExpectError([&] { SimilarityTable(src, {Profile("o", {"a"}, other)}); },
              ErrorKind::kUsage, "incomparable profiles");
}

TEST_CASE("similarity: tf-idf pairs re-embed against each pair") {
  EmbeddingConfig tfidf;
  tfidf.weighting = Weighting::kTfIdf;
  const DomainProfile src = Profile("src", {"a", "b", "c"}, tfidf);
  const DomainProfile t = Profile("t", {"a", "b", "d"}, tfidf);
  const auto rows = SimilarityTable(src, {src, t});
  CHECK(rows[0].cosine_distance == 0.0);
  CHECK(rows[1].cosine_distance > 0.0);
}

TEST_CASE("similarity: csv and json output") {
  const DomainProfile src = Profile("src", {"a", "b"});
  const auto rows = SimilarityTable(src, {Profile("t,1", {"b"})});
  std::ostringstream out;
  WriteSimilarityCsv(out, rows, {"run_config_hash"}, {"abc"});
  const auto parsed = csv::Parse(out.str());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0] == csv::Row{"source", "target", "lexical", "cosine", "kl",
                              "run_config_hash"});
  CHECK(parsed[1][1] == "t,1");
  CHECK(parsed[1][5] == "abc");
  CHECK(out.str().find("\r\n") != std::string::npos);

  const SimilarityRecord back =
      SimilarityFromJson(nlohmann::json::parse(SimilarityToJson(rows[0]).dump()));
  CHECK(back.target_id == "t,1");
  CHECK(back.lexical_difference == rows[0].lexical_difference);
  CHECK(back.cosine_distance == rows[0].cosine_distance);
  CHECK(back.kl_divergence == rows[0].kl_divergence);
}

TEST_CASE("lexical: bundled NER fixtures keep the expected ordering") {
  auto load = [](const std::string& name) {
    std::ifstream in(testing::FixtureDir() / "corpora/ner" / (name + ".conll"));
    return BuildProfile(ParseConll(in, {}, {name, name}), {});
  };
  const DomainProfile train = load("conll_train");
  const double dev = LexicalDifference(train, load("conll_dev"));
  const double test = LexicalDifference(train, load("conll_test"));
  const double wiki = LexicalDifference(train, load("wiki"));
  CHECK(dev < test);
  CHECK(test < wiki);
  for (const char* split : {"wnut_train", "wnut_dev", "wnut_test"}) {
    CHECK(wiki < LexicalDifference(train, load(split)));
  }
}

}  // namespace
}  // namespace transportkit
