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

#ifndef TRANSPORTKIT_PIPELINE_CONFIG_H_
#define TRANSPORTKIT_PIPELINE_CONFIG_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "transportkit/corpus.h"
#include "transportkit/divergence.h"
#include "transportkit/features.h"
#include "transportkit/transport.h"

namespace transportkit::pipeline {

struct CorpusSpec {
  std::string id;
  // As written in the config; resolved against RunConfig::base_dir.
  std::string path;
  // conll | jsonl | plaintext
  std::string format;
  std::vector<std::string> fields;
  PlaintextUnit unit = PlaintextUnit::kLine;
  // Score-table key this corpus stands for, used to join similarity rows
  // with scores.
  std::optional<SplitKey> key;
};

struct SimilaritySpec {
  std::string source;
  std::vector<std::string> targets;
  bool include_self = true;
};

struct TransportSpec {
  std::string system;
  std::string task;
  SplitKey source;
  std::vector<SplitKey> targets;
  std::vector<TargetGroup> groups;
};

struct FitSpec {
  std::vector<std::string> predictors = {"lexical", "cosine", "kl"};
  bool pooled = false;
  // Optional CSV of precomputed points: system,predictor,x,y[,label].
  std::optional<std::string> points;
  // Defaults to whether the score metric is a percentage.
  std::optional<bool> percentage;
};

struct RunConfig {
  std::filesystem::path base_dir;
  std::vector<CorpusSpec> corpora;
  TokenizerConfig tokenizer;
  EmbeddingConfig embedding;
  std::optional<std::string> external_embeddings;
  std::vector<SimilaritySpec> similarity;
  KlSettings kl;
  std::optional<std::string> scores;
  std::string metric = "score";
  std::vector<TransportSpec> transport;
  bool bias_corrected = false;
  FitSpec fit;
  std::filesystem::path out_dir;

  std::filesystem::path Resolve(const std::string& path) const;
  const CorpusSpec* FindCorpus(const std::string& id) const;

  // Canonical form; excludes base_dir and out_dir so that the same analysis
  // written to different places hashes identically.
  nlohmann::ordered_json ToJson() const;
  std::string Hash() const;
};

// Parses a config document. Relative paths are resolved against base_dir.
RunConfig ParseRunConfig(const nlohmann::ordered_json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Checks ids, cross references and that every referenced file exists.
void ValidateRunConfig(const RunConfig& config);

struct Overrides {
  std::optional<std::string> source;
  std::optional<std::vector<std::string>> targets;
  std::optional<std::string> predictor;
  std::optional<std::string> kl_direction;
  std::optional<double> kl_epsilon;
  bool bias_corrected = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

// --source/--targets name corpus ids for "similarity" and dataset:split keys
// for "transport"; other stages reject them.
void ApplyOverrides(RunConfig& config, const Overrides& overrides,
                    const std::string& stage);

}  // namespace transportkit::pipeline

#endif  // TRANSPORTKIT_PIPELINE_CONFIG_H_
