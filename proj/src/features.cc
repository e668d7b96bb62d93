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

#include "transportkit/features.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "transportkit/csv.h"
#include "transportkit/error.h"
#include "transportkit/hash.h"

namespace transportkit {

namespace {

std::string_view ToString(Weighting w) {
  return w == Weighting::kTf ? "tf" : "tfidf";
}

std::string_view ToString(Aggregation a) {
  return a == Aggregation::kCorpus ? "corpus" : "document_mean";
}

void AddDocumentFeatures(const std::vector<std::string>& tokens, int order,
                         TermFrequencies& counts) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string gram = tokens[i];
    ++counts[gram];
    for (int n = 2; n <= order && i + static_cast<std::size_t>(n) <= tokens.size();
         ++n) {
      gram += ' ';
      gram += tokens[i + static_cast<std::size_t>(n) - 1];
      ++counts[gram];
    }
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return std::string{std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>()};
}

}  // namespace

void EmbeddingConfig::Validate() const {
  if (dimension < 2) {
    throw UsageError("embedding dimension must be >= 2, got " +
                     std::to_string(dimension));
  }
  if (weighting == Weighting::kTfIdf &&
      aggregation == Aggregation::kDocumentMean) {
    throw UsageError(
        "tfidf weighting requires corpus aggregation (document_mean has no "
        "pairwise idf context)");
  }
}

std::string EmbeddingConfig::Hash() const {
  nlohmann::json j = *this;
  return HashToHex(Fnv1a64(j.dump()));
}

void to_json(nlohmann::json& j, const EmbeddingConfig& config) {
  j = nlohmann::json{{"aggregation", ToString(config.aggregation)},
                     {"dimension", config.dimension},
                     {"seed", config.seed},
                     {"weighting", ToString(config.weighting)}};
}

void from_json(const nlohmann::json& j, EmbeddingConfig& config) {
  EmbeddingConfig out;
  out.dimension = j.value("dimension", out.dimension);
  out.seed = j.value("seed", out.seed);
  const std::string weighting = j.value("weighting", std::string("tf"));
  if (weighting == "tf") {
    out.weighting = Weighting::kTf;
  } else if (weighting == "tfidf") {
    out.weighting = Weighting::kTfIdf;
  } else {
    throw UsageError("unknown weighting '" + weighting + "'");
  }
  const std::string aggregation = j.value("aggregation", std::string("corpus"));
  if (aggregation == "corpus") {
    out.aggregation = Aggregation::kCorpus;
  } else if (aggregation == "document_mean") {
    out.aggregation = Aggregation::kDocumentMean;
  } else {
    throw UsageError("unknown aggregation '" + aggregation + "'");
  }
  out.Validate();
  config = out;
}

std::string ProfileConfigHash(const DomainProfile& profile) {
  KeyHasher h;
  h.Add(profile.tokenizer_config.Hash());
  if (profile.embedding_source.kind == EmbeddingSource::Kind::kExternal) {
    h.Add("external").Add(profile.embedding_source.path);
  } else {
    h.Add("builtin").Add(profile.embedding_config.Hash());
  }
  return h.hex();
}

TermFrequencies CountFeatures(const Corpus& corpus) {
  TermFrequencies counts;
  const int order = corpus.tokenizer().ngram_order;
  for (const auto& doc : corpus.documents()) {
    AddDocumentFeatures(doc.tokens, order, counts);
  }
  return counts;
}

double PairIdf::operator()(const std::string& feature) const {
  int df = static_cast<int>(first_->count(feature)) +
           static_cast<int>(second_->count(feature));
  if (df < 1) df = 1;
  return std::log(2.0 / df) + 1.0;
}

void Normalize(std::vector<double>& v) {
  double sum_sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError("non-finite vector component");
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) throw NumericalError("degenerate embedding");
  const double norm = std::sqrt(sum_sq);
  for (double& x : v) x /= norm;
}

std::vector<double> EmbedBuiltin(const TermFrequencies& term_freq,
                                 const EmbeddingConfig& config,
                                 const PairIdf* idf) {
  config.Validate();
  if (term_freq.empty()) throw DataError("no features");
  std::vector<double> v(static_cast<std::size_t>(config.dimension), 0.0);
  const auto d = static_cast<std::uint64_t>(config.dimension);
  const bool use_idf = idf != nullptr && config.weighting == Weighting::kTfIdf;
  for (const auto& [feature, count] : term_freq) {
    double weight = static_cast<double>(count);
    if (use_idf) weight *= (*idf)(feature);
    const std::uint64_t h = FeatureHash(feature, config.seed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % d] += sign * weight;
  }
  Normalize(v);
  return v;
}

DomainProfile BuildProfile(const Corpus& corpus,
                           const EmbeddingConfig& config) {
  config.Validate();
  DomainProfile profile;
  profile.domain_id = corpus.domain_id();
  profile.tokenizer_config = corpus.tokenizer();
  profile.embedding_config = config;
  profile.term_freq = CountFeatures(corpus);
  if (profile.term_freq.empty()) throw DataError("no features");
  for (const auto& [feature, count] : profile.term_freq) {
    profile.vocabulary.insert(profile.vocabulary.end(), feature);
    profile.total_count += count;
  }
  if (config.aggregation == Aggregation::kCorpus) {
    profile.embedding = EmbedBuiltin(profile.term_freq, config);
  } else {
    std::vector<double> sum(static_cast<std::size_t>(config.dimension), 0.0);
    for (const auto& doc : corpus.documents()) {
      TermFrequencies doc_counts;
      AddDocumentFeatures(doc.tokens, corpus.tokenizer().ngram_order,
                          doc_counts);
      const std::vector<double> unit = EmbedBuiltin(doc_counts, config);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += unit[k];
    }
    Normalize(sum);
    profile.embedding = std::move(sum);
  }
  profile.embedding_source = EmbeddingSource{EmbeddingSource::Kind::kBuiltin,
                                             config.seed, config.dimension, ""};
  return profile;
}

void AttachExternalEmbedding(DomainProfile& profile, std::vector<double> vec,
                             const std::string& path) {
  Normalize(vec);
  profile.embedding_source = EmbeddingSource{
      EmbeddingSource::Kind::kExternal, 0, static_cast<int>(vec.size()), path};
  profile.embedding = std::move(vec);
}

std::map<std::string, std::vector<double>> LoadExternalEmbeddings(
    const std::string& path, const std::vector<std::string>& expected_domains) {
  const std::string text = ReadFile(path);
  std::map<std::string, std::vector<double>> vectors;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      for (const auto& [id, values] : j.items()) {
        std::vector<double> v;
        for (const auto& x : values) {
          if (!x.is_number()) {
            throw DataError(path + ": domain '" + id +
                            "' has a non-numeric component");
          }
          v.push_back(x.get<double>());
        }
        vectors.emplace(id, std::move(v));
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ": invalid embedding JSON: " + e.what());
    }
  } else {
    const auto rows = csv::Parse(text);
    if (rows.empty() || rows.front().empty() ||
        rows.front().front() != "domain_id") {
      throw DataError(path + ": expected CSV header 'domain_id,v0,...'");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      std::vector<double> v;
      for (std::size_t k = 1; k < row.size(); ++k) {
        v.push_back(csv::ParseDouble(
            row[k], path + " row " + std::to_string(r + 1)));
      }
      vectors.emplace(row.front(), std::move(v));
    }
  }

  std::size_t dimension = 0;
  for (auto& [id, v] : vectors) {
    if (v.empty()) throw DataError(path + ": domain '" + id + "' is empty");
    if (dimension == 0) dimension = v.size();
    if (v.size() != dimension) {
      throw DataError(path + ": ragged embedding dimensions (" +
                      std::to_string(dimension) + " vs " +
                      std::to_string(v.size()) + " for '" + id + "')");
    }
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw DataError(path + ": non-finite component for domain '" + id +
                        "'");
      }
    }
  }
  for (const auto& id : expected_domains) {
    if (!vectors.contains(id)) {
      throw DataError(path + ": missing embedding for domain '" + id + "'");
    }
  }
  for (auto& [id, v] : vectors) Normalize(v);
  return vectors;
}

nlohmann::ordered_json ProfileToJson(const DomainProfile& profile) {
  nlohmann::ordered_json out;
  out["domain_id"] = profile.domain_id;
  out["profile_config_hash"] = ProfileConfigHash(profile);
  out["tokenizer_config"] = nlohmann::json(profile.tokenizer_config);
  out["embedding_config"] = nlohmann::json(profile.embedding_config);
  nlohmann::ordered_json source;
  if (profile.embedding_source.kind == EmbeddingSource::Kind::kExternal) {
    source = {{"kind", "external"}, {"path", profile.embedding_source.path}};
  } else {
    source = {{"kind", "builtin"},
              {"seed", profile.embedding_source.seed},
              {"dimension", profile.embedding_source.dimension}};
  }
  out["embedding_source"] = std::move(source);
  out["total_count"] = profile.total_count;
  nlohmann::ordered_json tf = nlohmann::ordered_json::object();
  for (const auto& [feature, count] : profile.term_freq) tf[feature] = count;
  out["term_freq"] = std::move(tf);
  out["embedding"] = profile.embedding;
  return out;
}

DomainProfile ProfileFromJson(const nlohmann::json& j) {
  try {
    DomainProfile p;
    p.domain_id = j.at("domain_id").get<std::string>();
    p.tokenizer_config = j.at("tokenizer_config").get<TokenizerConfig>();
    p.embedding_config = j.at("embedding_config").get<EmbeddingConfig>();
    const auto& source = j.at("embedding_source");
    if (source.at("kind").get<std::string>() == "external") {
      p.embedding_source.kind = EmbeddingSource::Kind::kExternal;
      p.embedding_source.path = source.at("path").get<std::string>();
    } else {
      p.embedding_source.seed = source.at("seed").get<std::uint64_t>();
      p.embedding_source.dimension = source.at("dimension").get<int>();
    }
    for (const auto& [feature, count] : j.at("term_freq").items()) {
      p.term_freq.emplace(feature, count.get<std::uint64_t>());
      p.vocabulary.insert(feature);
      p.total_count += count.get<std::uint64_t>();
    }
    p.embedding = j.at("embedding").get<std::vector<double>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed profile JSON: ") + e.what());
  }
}

}  // namespace transportkit
