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

#include "transportkit/pipeline/config.h"

#include <fstream>
#include <iterator>
#include <set>

#include "transportkit/error.h"
#include "transportkit/hash.h"

namespace transportkit::pipeline {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> StringList(const Json& j, const std::string& what) {
  if (!j.is_array()) throw UsageError("config: '" + what + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw UsageError("config: '" + what + "' must hold strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

SplitKey KeyFrom(const Json& j) {
  if (j.is_string()) return SplitKey::Parse(j.get<std::string>());
  return SplitKey{j.at("dataset").get<std::string>(),
                  j.at("split").get<std::string>()};
}

std::vector<SplitKey> KeyList(const Json& j) {
  std::vector<SplitKey> keys;
  for (const auto& item : j) keys.push_back(KeyFrom(item));
  return keys;
}

std::vector<TargetGroup> GroupsFrom(const Json& j) {
  std::vector<TargetGroup> groups;
  if (j.is_object()) {
    for (const auto& [name, members] : j.items()) {
      groups.push_back(TargetGroup{name, KeyList(members)});
    }
  } else {
    for (const auto& g : j) {
      groups.push_back(TargetGroup{g.at("name").get<std::string>(),
                                   KeyList(g.at("members"))});
    }
  }
  return groups;
}

SimilaritySpec SimilarityFrom(const Json& j) {
  SimilaritySpec spec;
  spec.source = j.at("source").get<std::string>();
  spec.targets = StringList(j.at("targets"), "similarity.targets");
  spec.include_self = j.value("include_self", true);
  return spec;
}

Json KeyListJson(const std::vector<SplitKey>& keys) {
  Json out = Json::array();
  for (const auto& k : keys) out.push_back(k.ToString());
  return out;
}

}  // namespace

std::filesystem::path RunConfig::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  return p.is_absolute() ? p : base_dir / p;
}

const CorpusSpec* RunConfig::FindCorpus(const std::string& id) const {
  for (const auto& c : corpora) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json RunConfig::ToJson() const {
  Json j;
  Json corpora_json = Json::array();
  for (const auto& c : corpora) {
    Json cj;
    cj["id"] = c.id;
    cj["path"] = c.path;
    cj["format"] = c.format;
    cj["fields"] = c.fields;
    cj["unit"] = c.unit == PlaintextUnit::kLine ? "line" : "paragraph";
    cj["key"] = c.key ? Json(c.key->ToString()) : Json(nullptr);
    corpora_json.push_back(std::move(cj));
  }
  j["corpora"] = std::move(corpora_json);
  j["tokenizer"] = nlohmann::json(tokenizer);
  j["embedding"] = nlohmann::json(embedding);
  j["external_embeddings"] =
      external_embeddings ? Json(*external_embeddings) : Json(nullptr);
  Json sim = Json::array();
  for (const auto& s : similarity) {
    sim.push_back(Json{{"source", s.source},
                       {"targets", s.targets},
                       {"include_self", s.include_self}});
  }
  j["similarity"] = std::move(sim);
  j["kl"] = nlohmann::json(kl);
  j["scores"] = scores ? Json(*scores) : Json(nullptr);
  j["metric"] = metric;
  Json transport_json = Json::array();
  for (const auto& t : transport) {
    Json groups = Json::array();
    for (const auto& g : t.groups) {
      groups.push_back(Json{{"name", g.name}, {"members", KeyListJson(g.members)}});
    }
    transport_json.push_back(Json{{"system", t.system},
                                  {"task", t.task},
                                  {"source", t.source.ToString()},
                                  {"targets", KeyListJson(t.targets)},
                                  {"groups", std::move(groups)}});
  }
  j["transport"] = std::move(transport_json);
  j["bias_corrected"] = bias_corrected;
  Json fit_json;
  fit_json["predictors"] = fit.predictors;
  fit_json["pooled"] = fit.pooled;
  fit_json["points"] = fit.points ? Json(*fit.points) : Json(nullptr);
  fit_json["percentage"] = fit.percentage ? Json(*fit.percentage) : Json(nullptr);
  j["fit"] = std::move(fit_json);
  return j;
}

std::string RunConfig::Hash() const {
  return HashToHex(Fnv1a64(ToJson().dump()));
}

RunConfig ParseRunConfig(const nlohmann::ordered_json& j,
                         const std::filesystem::path& base_dir) {
  RunConfig config;
  config.base_dir = base_dir;
  try {
    if (!j.is_object()) throw UsageError("config: expected a JSON object");
    for (const auto& c : j.value("corpora", Json::array())) {
      CorpusSpec spec;
      spec.id = c.at("id").get<std::string>();
      spec.path = c.at("path").get<std::string>();
      spec.format = c.value("format", std::string("plaintext"));
      if (c.contains("fields")) {
        spec.fields = StringList(c.at("fields"), "fields");
      } else if (spec.format == "jsonl") {
        spec.fields = DefaultPairFields();
      }
      const std::string unit = c.value("unit", std::string("line"));
      if (unit == "line") {
        spec.unit = PlaintextUnit::kLine;
      } else if (unit == "paragraph") {
        spec.unit = PlaintextUnit::kParagraph;
      } else {
        throw UsageError("config: unknown plaintext unit '" + unit + "'");
      }
      if (c.contains("key")) {
        spec.key = KeyFrom(c.at("key"));
      } else if (c.contains("dataset")) {
        spec.key = SplitKey{c.at("dataset").get<std::string>(),
                            c.value("split", std::string("-"))};
      }
      config.corpora.push_back(std::move(spec));
    }
    if (j.contains("tokenizer")) {
      config.tokenizer = nlohmann::json(j.at("tokenizer")).get<TokenizerConfig>();
    }
    if (j.contains("embedding")) {
      config.embedding = nlohmann::json(j.at("embedding")).get<EmbeddingConfig>();
    }
    if (j.contains("external_embeddings") &&
        !j.at("external_embeddings").is_null()) {
      config.external_embeddings = j.at("external_embeddings").get<std::string>();
    }
    if (j.contains("similarity")) {
      const auto& s = j.at("similarity");
      if (s.is_array()) {
        for (const auto& item : s) config.similarity.push_back(SimilarityFrom(item));
      } else {
        config.similarity.push_back(SimilarityFrom(s));
      }
    }
    if (j.contains("kl")) config.kl = nlohmann::json(j.at("kl")).get<KlSettings>();
    if (j.contains("scores") && !j.at("scores").is_null()) {
      config.scores = j.at("scores").get<std::string>();
    }
    config.metric = j.value("metric", config.metric);
    for (const auto& t : j.value("transport", Json::array())) {
      std::vector<std::string> systems;
      if (t.contains("systems")) {
        systems = StringList(t.at("systems"), "transport.systems");
      } else {
        systems.push_back(t.at("system").get<std::string>());
      }
      for (const auto& system : systems) {
        TransportSpec spec;
        spec.system = system;
        spec.task = t.at("task").get<std::string>();
        spec.source = KeyFrom(t.at("source"));
        spec.targets = KeyList(t.at("targets"));
        if (t.contains("groups")) spec.groups = GroupsFrom(t.at("groups"));
        config.transport.push_back(std::move(spec));
      }
    }
    config.bias_corrected = j.value("bias_corrected", false);
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      if (f.contains("predictors")) {
        config.fit.predictors = StringList(f.at("predictors"), "fit.predictors");
      }
      config.fit.pooled = f.value("pooled", false);
      if (f.contains("points") && !f.at("points").is_null()) {
        config.fit.points = f.at("points").get<std::string>();
      }
      if (f.contains("percentage") && !f.at("percentage").is_null()) {
        config.fit.percentage = f.at("percentage").get<bool>();
      }
    }
    config.out_dir = config.Resolve(j.value("out", std::string("out")));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config '" + path.string() + "': " + e.what());
  }
  return ParseRunConfig(j, path.parent_path());
}

void ValidateRunConfig(const RunConfig& config) {
  std::set<std::string> ids;
  for (const auto& c : config.corpora) {
    if (c.id.empty()) throw UsageError("config: empty corpus id");
    if (!ids.insert(c.id).second) {
      throw UsageError("config: duplicate corpus id '" + c.id + "'");
    }
    if (c.format != "conll" && c.format != "jsonl" && c.format != "plaintext") {
      throw UsageError("config: corpus '" + c.id + "' has unknown format '" +
                       c.format + "'");
    }
    if (!std::filesystem::exists(config.Resolve(c.path))) {
      throw UsageError("config: corpus '" + c.id + "' path does not exist: " +
                       c.path);
    }
  }
  auto require_file = [&](const std::optional<std::string>& path,
                          const std::string& what) {
    if (path && !std::filesystem::exists(config.Resolve(*path))) {
      throw UsageError("config: " + what + " does not exist: " + *path);
    }
  };
  require_file(config.external_embeddings, "external_embeddings");
  require_file(config.scores, "scores");
  require_file(config.fit.points, "fit.points");
  for (const auto& s : config.similarity) {
    if (!ids.contains(s.source)) {
      throw UsageError("config: similarity source '" + s.source +
                       "' is not a corpus id");
    }
    if (s.targets.empty() && !s.include_self) {
      throw UsageError("config: similarity table for '" + s.source +
                       "' has no targets");
    }
    for (const auto& t : s.targets) {
      if (!ids.contains(t)) {
        throw UsageError("config: similarity target '" + t +
                         "' is not a corpus id");
      }
    }
  }
  for (const auto& t : config.transport) {
    if (t.targets.empty()) {
      throw UsageError("config: transport entry for '" + t.system +
                       "' has an empty target list");
    }
  }
  for (const auto& p : config.fit.predictors) {
    if (p != "lexical" && p != "cosine" && p != "kl") {
      throw UsageError("config: unknown predictor '" + p + "'");
    }
  }
}

void ApplyOverrides(RunConfig& config, const Overrides& o,
                    const std::string& stage) {
  if (o.source || o.targets) {
    if (stage == "similarity") {
      SimilaritySpec spec = config.similarity.empty() ? SimilaritySpec{}
                                                      : config.similarity.front();
      if (o.source) spec.source = *o.source;
      if (o.targets) spec.targets = *o.targets;
      config.similarity = {spec};
    } else if (stage == "transport") {
      for (auto& t : config.transport) {
        if (o.source) t.source = SplitKey::Parse(*o.source);
        if (o.targets) {
          t.targets.clear();
          for (const auto& s : *o.targets) t.targets.push_back(SplitKey::Parse(s));
          t.groups.clear();
        }
      }
    } else {
      throw UsageError("--source/--targets apply only to the similarity and "
                       "transport subcommands");
    }
    if (o.targets && o.targets->empty()) {
      throw UsageError("empty target list");
    }
  }
  if (o.predictor) config.fit.predictors = {*o.predictor};
  if (o.kl_direction) {
    if (*o.kl_direction == "forward") {
      config.kl.direction = KlDirection::kForward;
    } else if (*o.kl_direction == "reverse") {
      config.kl.direction = KlDirection::kReverse;
    } else {
      throw UsageError("--kl-direction must be forward or reverse");
    }
  }
  if (o.kl_epsilon) {
    if (!(*o.kl_epsilon > 0.0)) throw UsageError("--kl-epsilon must be > 0");
    config.kl.epsilon = *o.kl_epsilon;
  }
  if (o.bias_corrected) config.bias_corrected = true;
  if (o.seed) config.embedding.seed = *o.seed;
  if (o.out) config.out_dir = *o.out;
}

}  // namespace transportkit::pipeline
