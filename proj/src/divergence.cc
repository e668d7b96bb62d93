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

#include "transportkit/divergence.h"

#include <algorithm>
#include <cmath>

#include "transportkit/csv.h"
#include "transportkit/error.h"
#include "transportkit/hash.h"

namespace transportkit {

namespace {

constexpr double kSnapToZero = 1e-12;

void CheckPair(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UsageError("zero-length vector");
  if (a.size() != b.size()) {
    throw UsageError("dimension mismatch: " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(b[k])) {
      throw NumericalError("non-finite vector component");
    }
  }
}

}  // namespace

double LexicalDifference(const std::set<std::string>& source_vocabulary,
                         const std::set<std::string>& target_vocabulary) {
  if (target_vocabulary.empty()) {
    throw UsageError("lexical difference needs a non-empty target vocabulary");
  }
  std::size_t shared = 0;
  auto s = source_vocabulary.begin();
  for (const auto& feature : target_vocabulary) {
    s = std::lower_bound(s, source_vocabulary.end(), feature);
    if (s == source_vocabulary.end()) break;
    if (*s == feature) ++shared;
  }
  return 1.0 - static_cast<double>(shared) /
                   static_cast<double>(target_vocabulary.size());
}

double LexicalDifference(const DomainProfile& source,
                         const DomainProfile& target) {
  return LexicalDifference(source.vocabulary, target.vocabulary);
}

double CosineDistance(std::span<const double> source,
                      std::span<const double> target) {
  CheckPair(source, target);
  double dot = 0.0;
  for (std::size_t k = 0; k < source.size(); ++k) dot += source[k] * target[k];
  double d = std::clamp(1.0 - dot, 0.0, 2.0);
  if (d < kSnapToZero) d = 0.0;
  return d;
}

std::string KlSettings::Hash() const {
  nlohmann::json j = *this;
  return HashToHex(Fnv1a64(j.dump()));
}

void to_json(nlohmann::json& j, const KlSettings& settings) {
  j = nlohmann::json{
      {"conversion",
       settings.conversion == KlConversion::kShift ? "shift" : "softmax"},
      {"direction",
       settings.direction == KlDirection::kForward ? "forward" : "reverse"},
      {"epsilon", settings.epsilon}};
}

void from_json(const nlohmann::json& j, KlSettings& settings) {
  KlSettings out;
  out.epsilon = j.value("epsilon", out.epsilon);
  const std::string direction = j.value("direction", std::string("forward"));
  if (direction == "forward") {
    out.direction = KlDirection::kForward;
  } else if (direction == "reverse") {
    out.direction = KlDirection::kReverse;
  } else {
    throw UsageError("unknown KL direction '" + direction + "'");
  }
  const std::string conversion = j.value("conversion", std::string("shift"));
  if (conversion == "shift") {
    out.conversion = KlConversion::kShift;
  } else if (conversion == "softmax") {
    out.conversion = KlConversion::kSoftmax;
  } else {
    throw UsageError("unknown KL conversion '" + conversion + "'");
  }
  if (!(out.epsilon > 0.0) || !std::isfinite(out.epsilon)) {
    throw UsageError("KL epsilon must be a positive finite number");
  }
  settings = out;
}

std::vector<double> ToDistribution(std::span<const double> v,
                                   KlConversion conversion, double epsilon) {
  if (v.empty()) throw UsageError("zero-length vector");
  std::vector<double> p(v.size());
  double total = 0.0;
  if (conversion == KlConversion::kShift) {
    const double lo = *std::min_element(v.begin(), v.end());
    for (std::size_t k = 0; k < v.size(); ++k) {
      p[k] = (v[k] - lo) + epsilon;
      total += p[k];
    }
  } else {
    const double hi = *std::max_element(v.begin(), v.end());
    for (std::size_t k = 0; k < v.size(); ++k) {
      p[k] = std::exp(v[k] - hi);
      total += p[k];
    }
  }
  for (double& x : p) x /= total;
  return p;
}

double RelativeEntropy(std::span<const double> q, std::span<const double> p) {
  CheckPair(q, p);
  double sum = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] == 0.0) continue;
    sum += q[k] * std::log(q[k] / p[k]);
  }
  return sum;
}

double KlDivergence(std::span<const double> source,
                    std::span<const double> target,
                    const KlSettings& settings) {
  CheckPair(source, target);
  const auto p = ToDistribution(source, settings.conversion, settings.epsilon);
  const auto q = ToDistribution(target, settings.conversion, settings.epsilon);
  double kl = settings.direction == KlDirection::kForward
                  ? RelativeEntropy(q, p)
                  : RelativeEntropy(p, q);
  if (std::isnan(kl)) throw NumericalError("KL divergence evaluated to NaN");
  // Gibbs' inequality holds exactly; negative values are rounding residue.
  return kl < 0.0 ? 0.0 : kl;
}

std::vector<SimilarityRecord> SimilarityTable(
    const DomainProfile& source, const std::vector<DomainProfile>& targets,
    const SimilaritySettings& settings) {
  const std::string source_hash = ProfileConfigHash(source);
  const std::string record_hash =
      KeyHasher().Add(source_hash).Add(settings.kl.Hash()).hex();
  const bool pairwise_idf =
      source.embedding_source.kind == EmbeddingSource::Kind::kBuiltin &&
      source.embedding_config.weighting == Weighting::kTfIdf;

  auto compare = [&](const DomainProfile& target) {
    if (ProfileConfigHash(target) != source_hash) {
      throw UsageError("incomparable profiles: '" + source.domain_id +
                       "' and '" + target.domain_id +
                       "' were built with different configurations");
    }
    SimilarityRecord r;
    r.source_id = source.domain_id;
    r.target_id = target.domain_id;
    r.config_hash = record_hash;
    r.lexical_difference = LexicalDifference(source, target);
    if (pairwise_idf) {
      const PairIdf idf(source.vocabulary, target.vocabulary);
      const auto s = EmbedBuiltin(source.term_freq, source.embedding_config, &idf);
      const auto t = EmbedBuiltin(target.term_freq, target.embedding_config, &idf);
      r.cosine_distance = CosineDistance(s, t);
      r.kl_divergence = KlDivergence(s, t, settings.kl);
    } else {
      r.cosine_distance = CosineDistance(source.embedding, target.embedding);
      r.kl_divergence =
          KlDivergence(source.embedding, target.embedding, settings.kl);
    }
    return r;
  };

  std::vector<SimilarityRecord> records;
  records.reserve(targets.size() + 1);
  if (settings.include_self) records.push_back(compare(source));
  for (const auto& target : targets) records.push_back(compare(target));
  return records;
}

void WriteSimilarityCsv(std::ostream& out,
                        const std::vector<SimilarityRecord>& records,
                        const std::vector<std::string>& extra_header,
                        const std::vector<std::string>& extra_values) {
  csv::Row header = {"source", "target", "lexical", "cosine", "kl"};
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  csv::WriteRow(out, header);
  for (const auto& r : records) {
    csv::Row row = {r.source_id, r.target_id,
                    csv::FormatDouble(r.lexical_difference),
                    csv::FormatDouble(r.cosine_distance),
                    csv::FormatDouble(r.kl_divergence)};
    row.insert(row.end(), extra_values.begin(), extra_values.end());
    csv::WriteRow(out, row);
  }
}

nlohmann::ordered_json SimilarityToJson(const SimilarityRecord& record) {
  nlohmann::ordered_json j;
  j["source"] = record.source_id;
  j["target"] = record.target_id;
  j["lexical"] = record.lexical_difference;
  j["cosine"] = record.cosine_distance;
  j["kl"] = record.kl_divergence;
  j["config_hash"] = record.config_hash;
  return j;
}

SimilarityRecord SimilarityFromJson(const nlohmann::json& j) {
  try {
    SimilarityRecord r;
    r.source_id = j.at("source").get<std::string>();
    r.target_id = j.at("target").get<std::string>();
    r.lexical_difference = j.at("lexical").get<double>();
    r.cosine_distance = j.at("cosine").get<double>();
    r.kl_divergence = j.at("kl").get<double>();
    r.config_hash = j.value("config_hash", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed similarity record: ") + e.what());
  }
}

}  // namespace transportkit
