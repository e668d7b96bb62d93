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

#ifndef TRANSPORTKIT_DIVERGENCE_H_
#define TRANSPORTKIT_DIVERGENCE_H_

#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "transportkit/features.h"

namespace transportkit {

// 1 - |V_target ∩ V_source| / |V_target| over type vocabularies: the share
// of target feature types never seen in the source. Not symmetric.
double LexicalDifference(const std::set<std::string>& source_vocabulary,
                         const std::set<std::string>& target_vocabulary);
double LexicalDifference(const DomainProfile& source,
                         const DomainProfile& target);

// 1 - <u, v> for unit vectors, clamped to [0, 2]; results below 1e-12 snap
// to exactly 0.
double CosineDistance(std::span<const double> source,
                      std::span<const double> target);

enum class KlDirection {
  // KL(target || source): target mass the source does not explain.
  kForward,
  kReverse,
};

enum class KlConversion {
  // p_k = (v_k - min v + eps) / sum_j (v_j - min v + eps)
  kShift,
  // p_k = exp(v_k - max v) / sum_j exp(v_j - max v)
  kSoftmax,
};

struct KlSettings {
  double epsilon = 1e-9;
  KlDirection direction = KlDirection::kForward;
  KlConversion conversion = KlConversion::kShift;

  std::string Hash() const;
};

void to_json(nlohmann::json& j, const KlSettings& settings);
void from_json(const nlohmann::json& j, KlSettings& settings);

std::vector<double> ToDistribution(std::span<const double> v,
                                   KlConversion conversion, double epsilon);

// sum_k q_k ln(q_k / p_k) over two probability vectors; terms with q_k = 0
// contribute nothing.
double RelativeEntropy(std::span<const double> q, std::span<const double> p);

// Converts both vectors to distributions and returns KL(target || source),
// or KL(source || target) with KlDirection::kReverse.
double KlDivergence(std::span<const double> source,
                    std::span<const double> target,
                    const KlSettings& settings = {});

struct SimilarityRecord {
  std::string source_id;
  std::string target_id;
  double lexical_difference = 0.0;
  double cosine_distance = 0.0;
  double kl_divergence = 0.0;
  std::string config_hash;
};

struct SimilaritySettings {
  KlSettings kl;
  // Prepend a source-vs-itself row.
  bool include_self = false;
};

// One record per target in input order. Throws a usage error
// "incomparable profiles" when the profiles were built differently.
std::vector<SimilarityRecord> SimilarityTable(
    const DomainProfile& source, const std::vector<DomainProfile>& targets,
    const SimilaritySettings& settings = {});

// Column order: source,target,lexical,cosine,kl, followed by any extra
// trailing columns given in `extra`.
void WriteSimilarityCsv(std::ostream& out,
                        const std::vector<SimilarityRecord>& records,
                        const std::vector<std::string>& extra_header = {},
                        const std::vector<std::string>& extra_values = {});
nlohmann::ordered_json SimilarityToJson(const SimilarityRecord& record);
SimilarityRecord SimilarityFromJson(const nlohmann::json& j);

}  // namespace transportkit

#endif  // TRANSPORTKIT_DIVERGENCE_H_
