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

#ifndef TRANSPORTKIT_FEATURES_H_
#define TRANSPORTKIT_FEATURES_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "transportkit/corpus.h"

namespace transportkit {

using TermFrequencies = std::map<std::string, std::uint64_t>;

enum class Weighting { kTf, kTfIdf };

// How a corpus becomes one vector: project the aggregated term frequencies
// once, or project each document and average the unit vectors.
enum class Aggregation { kCorpus, kDocumentMean };

struct EmbeddingConfig {
  static constexpr std::uint64_t kDefaultSeed = 0x7472616e73706f72ULL;

  int dimension = 300;
  std::uint64_t seed = kDefaultSeed;
  Weighting weighting = Weighting::kTf;
  Aggregation aggregation = Aggregation::kCorpus;

  void Validate() const;
  std::string Hash() const;

  friend bool operator==(const EmbeddingConfig&,
                         const EmbeddingConfig&) = default;
};

void to_json(nlohmann::json& j, const EmbeddingConfig& config);
void from_json(const nlohmann::json& j, EmbeddingConfig& config);

struct EmbeddingSource {
  enum class Kind { kBuiltin, kExternal };
  Kind kind = Kind::kBuiltin;
  // Builtin only.
  std::uint64_t seed = 0;
  int dimension = 0;
  // External only.
  std::string path;

  friend bool operator==(const EmbeddingSource&,
                         const EmbeddingSource&) = default;
};

struct DomainProfile {
  std::string domain_id;
  // Key set of term_freq.
  std::set<std::string> vocabulary;
  TermFrequencies term_freq;
  std::uint64_t total_count = 0;
  // Unit Euclidean norm.
  std::vector<double> embedding;
  EmbeddingSource embedding_source;
  EmbeddingConfig embedding_config;
  TokenizerConfig tokenizer_config;
};

// Hash over everything that makes two profiles comparable: tokenizer,
// embedding config and embedding source kind/path.
std::string ProfileConfigHash(const DomainProfile& profile);

// Space-joined n-grams of orders 1..ngram_order, never crossing a document
// boundary.
TermFrequencies CountFeatures(const Corpus& corpus);

// Document frequencies over a pair of compared corpora:
// idf(f) = ln(2 / df(f)) + 1 with df in {1, 2}.
class PairIdf {
 public:
  PairIdf(const std::set<std::string>& first,
          const std::set<std::string>& second)
      : first_(&first), second_(&second) {}

  double operator()(const std::string& feature) const;

 private:
  const std::set<std::string>* first_;
  const std::set<std::string>* second_;
};

// Signed feature hashing projection, L2-normalized. The weight of a feature
// is its count, times idf when an idf context is supplied and the config
// asks for tf-idf. Throws a numerical error "degenerate embedding" when the
// accumulated vector is zero.
std::vector<double> EmbedBuiltin(const TermFrequencies& term_freq,
                                 const EmbeddingConfig& config,
                                 const PairIdf* idf = nullptr);

// Scales to unit Euclidean norm. Throws on an all-zero or non-finite vector.
void Normalize(std::vector<double>& v);

DomainProfile BuildProfile(const Corpus& corpus, const EmbeddingConfig& config);

// Replaces the embedding of a profile with an externally computed one.
void AttachExternalEmbedding(DomainProfile& profile, std::vector<double> vec,
                             const std::string& path);

// Reads {"domain": [floats...], ...} JSON or a CSV with header
// domain_id,v0,...,v{d-1}. Every expected domain must be present; vectors
// must share one dimension and be finite. Returned vectors are unit norm.
std::map<std::string, std::vector<double>> LoadExternalEmbeddings(
    const std::string& path, const std::vector<std::string>& expected_domains);

nlohmann::ordered_json ProfileToJson(const DomainProfile& profile);
DomainProfile ProfileFromJson(const nlohmann::json& j);

}  // namespace transportkit

#endif  // TRANSPORTKIT_FEATURES_H_
