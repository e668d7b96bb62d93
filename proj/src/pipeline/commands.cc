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

#include "transportkit/pipeline/commands.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "transportkit/csv.h"
#include "transportkit/error.h"
#include "transportkit/hash.h"
#include "transportkit/regression.h"

namespace transportkit::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kStampHeader = {"run_config_hash",
                                               "tool_version"};

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::string{std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>()};
}

Json ReadJson(const fs::path& path) {
  try {
    return Json::parse(ReadBytes(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

Json Stamped(const RunConfig& config) {
  Json j;
  j["tool_version"] = kToolVersion;
  j["config_hash"] = config.Hash();
  return j;
}

std::vector<std::string> StampValues(const RunConfig& config) {
  return {config.Hash(), kToolVersion};
}

// File-system safe rendering of an identifier.
std::string SafeName(std::string_view id) {
  std::string out;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' ||
                    ch == '.';
    out.push_back(ok ? ch : '_');
  }
  return out.empty() ? "_" : out;
}

fs::path ProfilePath(const RunConfig& config, const std::string& id) {
  return config.out_dir / "profiles" / (SafeName(id) + ".json");
}

fs::path CorpusPath(const RunConfig& config, const std::string& id) {
  return config.out_dir / "corpora" / (SafeName(id) + ".json");
}

const fs::path kSimilarityFile = fs::path("similarity") / "similarity.json";
const fs::path kTransportFile = fs::path("transport") / "transport.json";
const fs::path kTransportText = fs::path("transport") / "transport.txt";
const fs::path kFitsFile = fs::path("fit") / "fits.json";

std::string ExpectedProfileHash(const RunConfig& config) {
  DomainProfile probe;
  probe.tokenizer_config = config.tokenizer;
  probe.embedding_config = config.embedding;
  if (config.external_embeddings) {
    probe.embedding_source.kind = EmbeddingSource::Kind::kExternal;
    probe.embedding_source.path = *config.external_embeddings;
  }
  return ProfileConfigHash(probe);
}

std::string CacheKey(const RunConfig& config, const CorpusSpec& spec,
                     const std::string& bytes,
                     const std::string& external_bytes) {
  KeyHasher h;
  h.Add(spec.id).Add(spec.format);
  for (const auto& f : spec.fields) h.Add(f);
  h.Add(spec.unit == PlaintextUnit::kLine ? "line" : "paragraph");
  h.Add(config.tokenizer.Hash()).Add(config.embedding.Hash());
  if (config.external_embeddings) {
    h.Add(*config.external_embeddings).Add(Fnv1a64(external_bytes));
  }
  h.Add(Fnv1a64(bytes));
  return h.hex();
}

Corpus ParseSpec(const RunConfig& config, const CorpusSpec& spec,
                 const std::string& bytes) {
  std::istringstream in(bytes);
  const SourceInfo source{spec.id, spec.path};
  if (spec.format == "conll") return ParseConll(in, config.tokenizer, source);
  if (spec.format == "jsonl") {
    return ParseJsonlPairs(in, spec.fields, config.tokenizer, source);
  }
  return ParsePlaintext(in, config.tokenizer, source, spec.unit);
}

int Fail(Console console, const Error& e) {
  console.err << "error: " << e.what() << '\n';
  return ExitCodeFor(e.kind());
}

DomainProfile LoadProfile(const RunConfig& config, const std::string& id,
                          const std::string& expected_hash) {
  const fs::path path = ProfilePath(config, id);
  if (!fs::exists(path)) {
    throw DataError("missing profile '" + id + "' (run ingest)");
  }
  DomainProfile profile = ProfileFromJson(nlohmann::json(ReadJson(path)));
  if (ProfileConfigHash(profile) != expected_hash) {
    throw DataError("profile '" + id +
                    "' was built with a different configuration (run ingest)");
  }
  return profile;
}

double Predictor(const SimilarityRecord& r, const std::string& name) {
  if (name == "lexical") return r.lexical_difference;
  if (name == "cosine") return r.cosine_distance;
  return r.kl_divergence;
}

struct LabeledPoint {
  std::string label;
  CurvePoint point;
};

// (predictor, system) -> points, with systems kept in first-seen order.
struct PointSets {
  std::vector<std::string> systems;
  std::map<std::pair<std::string, std::string>, std::vector<LabeledPoint>> sets;

  void Add(const std::string& predictor, const std::string& system,
           LabeledPoint p) {
    if (std::find(systems.begin(), systems.end(), system) == systems.end()) {
      systems.push_back(system);
    }
    sets[{predictor, system}].push_back(std::move(p));
  }
};

PointSets PointsFromFile(const RunConfig& config) {
  const std::string path = config.Resolve(*config.fit.points).string();
  const auto rows = csv::Parse(ReadBytes(path));
  if (rows.empty() || rows.front().size() < 4 || rows.front()[0] != "system" ||
      rows.front()[1] != "predictor" || rows.front()[2] != "x" ||
      rows.front()[3] != "y") {
    throw DataError(path + ": expected header system,predictor,x,y[,label]");
  }
  PointSets sets;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = path + " row " + std::to_string(r + 1);
    if (row.size() < 4) throw DataError(where + ": too few fields");
    const std::string label =
        row.size() > 4 ? row[4] : "point" + std::to_string(r);
    sets.Add(row[1], row[0],
             LabeledPoint{label, {csv::ParseDouble(row[2], where),
                                  csv::ParseDouble(row[3], where)}});
  }
  return sets;
}

PointSets PointsFromPipeline(const RunConfig& config) {
  if (!config.scores) throw UsageError("fit: config has no score table");
  if (config.transport.empty()) {
    throw UsageError("fit: config has no transport entries naming systems");
  }
  const fs::path sim_path = config.out_dir / kSimilarityFile;
  if (!fs::exists(sim_path)) {
    throw UsageError("missing stage output: run 'similarity' first");
  }
  const Json sim = ReadJson(sim_path);
  const ScoreTable table =
      LoadScoreTable(config.Resolve(*config.scores).string(), config.metric);

  PointSets sets;
  for (const auto& spec : config.transport) {
    const CorpusSpec* source_corpus = nullptr;
    for (const auto& c : config.corpora) {
      if (c.key && *c.key == spec.source) source_corpus = &c;
    }
    const Json* records = nullptr;
    if (source_corpus != nullptr) {
      for (const auto& t : sim.at("tables")) {
        if (t.at("source").get<std::string>() == source_corpus->id) {
          records = &t.at("records");
        }
      }
    }
    if (records == nullptr) {
      sets.systems.push_back(spec.system);
      continue;
    }
    for (const auto& rj : *records) {
      const SimilarityRecord r = SimilarityFromJson(nlohmann::json(rj));
      const CorpusSpec* target = config.FindCorpus(r.target_id);
      if (target == nullptr || !target->key) continue;
      const auto score = table.Find(spec.system, spec.task, *target->key);
      if (!score) continue;
      for (const auto& predictor : config.fit.predictors) {
        sets.Add(predictor, spec.system,
                 LabeledPoint{r.target_id, {Predictor(r, predictor), *score}});
      }
    }
    if (std::find(sets.systems.begin(), sets.systems.end(), spec.system) ==
        sets.systems.end()) {
      sets.systems.push_back(spec.system);
    }
  }
  return sets;
}

}  // namespace

OutputLock::OutputLock(const fs::path& out_dir)
    : path_(out_dir / ".transportkit.lock") {
  fs::create_directories(out_dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    path_.clear();
    throw UsageError("output directory '" + out_dir.string() +
                     "' is locked by another invocation (remove " +
                     (out_dir / ".transportkit.lock").string() +
                     " if stale)");
  }
  ::close(fd);
}

OutputLock::~OutputLock() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

bool WriteIfChanged(const fs::path& path, const std::string& content) {
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    const std::string existing{std::istreambuf_iterator<char>(in),
                               std::istreambuf_iterator<char>()};
    if (existing == content) return false;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
  return true;
}

int CmdIngest(const RunConfig& config, Console console) {
  try {
    ValidateRunConfig(config);
    if (config.corpora.empty()) throw UsageError("ingest: no corpora configured");

    std::map<std::string, std::vector<double>> external;
    std::string external_bytes;
    if (config.external_embeddings) {
      const fs::path path = config.Resolve(*config.external_embeddings);
      external_bytes = ReadBytes(path);
      std::vector<std::string> ids;
      for (const auto& c : config.corpora) ids.push_back(c.id);
      external = LoadExternalEmbeddings(path.string(), ids);
    }

    Json entries = Json::array();
    int exit_code = 0;
    for (const auto& spec : config.corpora) {
      try {
        const std::string bytes = ReadBytes(config.Resolve(spec.path));
        const std::string key = CacheKey(config, spec, bytes, external_bytes);
        const fs::path profile_path = ProfilePath(config, spec.id);
        const fs::path corpus_path = CorpusPath(config, spec.id);

        Json summary;
        if (fs::exists(profile_path) && fs::exists(corpus_path)) {
          const Json cached = ReadJson(profile_path);
          if (cached.value("cache_key", "") == key) {
            summary = cached;
            console.out << "cache hit: " << spec.id << '\n';
          }
        }
        if (summary.is_null()) {
          const Corpus corpus = ParseSpec(config, spec, bytes);
          DomainProfile profile = BuildProfile(corpus, config.embedding);
          if (config.external_embeddings) {
            AttachExternalEmbedding(profile, external.at(spec.id),
                                    *config.external_embeddings);
          }
          Json corpus_json;
          corpus_json["tool_version"] = kToolVersion;
          corpus_json["cache_key"] = key;
          corpus_json.update(CorpusToJson(corpus));
          WriteIfChanged(corpus_path, Dump(corpus_json));

          summary["tool_version"] = kToolVersion;
          summary["cache_key"] = key;
          summary["documents"] = corpus.documents().size();
          summary["tokens"] = corpus.token_count();
          summary["skipped_records"] = corpus.provenance().skipped_records;
          summary.update(ProfileToJson(profile));
          WriteIfChanged(profile_path, Dump(summary));
          console.out << "ingested: " << spec.id << " ("
                      << corpus.documents().size() << " documents, "
                      << corpus.token_count() << " tokens, "
                      << profile.vocabulary.size() << " features)\n";
          if (corpus.provenance().skipped_records > 0) {
            console.err << "warning: " << spec.id << ": skipped "
                        << corpus.provenance().skipped_records
                        << " records without any requested field\n";
          }
        }
        Json entry;
        entry["domain_id"] = spec.id;
        entry["cache_key"] = key;
        entry["corpus_file"] = fs::relative(corpus_path, config.out_dir).generic_string();
        entry["profile_file"] = fs::relative(profile_path, config.out_dir).generic_string();
        entry["documents"] = summary.at("documents");
        entry["tokens"] = summary.at("tokens");
        entry["skipped_records"] = summary.at("skipped_records");
        entries.push_back(std::move(entry));
      } catch (const Error& e) {
        console.err << "error: corpus '" << spec.id << "' (" << spec.path
                    << "): " << e.what() << '\n';
        exit_code = std::max(exit_code, ExitCodeFor(e.kind()));
      }
    }
    Json manifest = Stamped(config);
    manifest["profiles"] = std::move(entries);
    WriteIfChanged(config.out_dir / "manifest.json", Dump(manifest));
    return exit_code;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

int CmdSimilarity(const RunConfig& config, Console console) {
  try {
    ValidateRunConfig(config);
    if (config.similarity.empty()) {
      throw UsageError("similarity: no similarity tables configured");
    }
    const std::string expected = ExpectedProfileHash(config);
    Json combined = Stamped(config);
    Json tables = Json::array();
    for (const auto& spec : config.similarity) {
      const DomainProfile source = LoadProfile(config, spec.source, expected);
      std::vector<DomainProfile> targets;
      for (const auto& id : spec.targets) {
        targets.push_back(LoadProfile(config, id, expected));
      }
      SimilaritySettings settings;
      settings.kl = config.kl;
      settings.include_self = spec.include_self;
      const auto records = SimilarityTable(source, targets, settings);

      std::ostringstream csv_out;
      WriteSimilarityCsv(csv_out, records, kStampHeader, StampValues(config));
      const fs::path dir = config.out_dir / "similarity";
      WriteIfChanged(dir / (SafeName(spec.source) + ".csv"), csv_out.str());

      Json rows = Json::array();
      for (const auto& r : records) rows.push_back(SimilarityToJson(r));
      Json table = Stamped(config);
      table["source"] = spec.source;
      table["records"] = rows;
      WriteIfChanged(dir / (SafeName(spec.source) + ".json"), Dump(table));
      tables.push_back(Json{{"source", spec.source}, {"records", rows}});

      console.out << fmt::format("similarity from {}\n", spec.source);
      console.out << fmt::format("  {:<20} {:>8} {:>8} {:>8}\n", "target",
                                 "lexical", "cosine", "kl");
      for (const auto& r : records) {
        console.out << fmt::format("  {:<20} {:>8.3f} {:>8.3f} {:>8.3f}\n",
                                   r.target_id, r.lexical_difference,
                                   r.cosine_distance, r.kl_divergence);
      }
    }
    combined["tables"] = std::move(tables);
    WriteIfChanged(config.out_dir / kSimilarityFile, Dump(combined));
    return 0;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

int CmdTransport(const RunConfig& config, Console console) {
  try {
    ValidateRunConfig(config);
    if (!config.scores) throw UsageError("transport: config has no score table");
    if (config.transport.empty()) {
      throw UsageError("transport: no transport entries configured");
    }
    const ScoreTable table =
        LoadScoreTable(config.Resolve(*config.scores).string(), config.metric);
    std::vector<TransportReport> reports;
    for (const auto& spec : config.transport) {
      ReportOptions options;
      options.bias_corrected = config.bias_corrected;
      options.groups = spec.groups;
      reports.push_back(BuildReport(table, spec.system, spec.task, spec.source,
                                    spec.targets, options));
    }
    Json out = Stamped(config);
    out["metric"] = table.metric_name();
    Json list = Json::array();
    for (const auto& r : reports) list.push_back(ReportToJson(r));
    out["reports"] = std::move(list);
    WriteIfChanged(config.out_dir / kTransportFile, Dump(out));

    std::ostringstream text;
    text << "# transportability (" << table.metric_name()
         << (config.bias_corrected ? ", bias corrected" : "")
         << ") config " << config.Hash() << " tool " << kToolVersion << '\n';
    RenderTransportTable(text, reports);
    WriteIfChanged(config.out_dir / kTransportText, text.str());
    console.out << text.str();
    return 0;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

int CmdFit(const RunConfig& config, Console console) {
  try {
    ValidateRunConfig(config);
    PointSets sets =
        config.fit.points ? PointsFromFile(config) : PointsFromPipeline(config);
    const bool percentage =
        config.fit.percentage.value_or(IsPercentageMetric(config.metric));

    if (config.fit.pooled) {
      PointSets pooled;
      for (const auto& predictor : config.fit.predictors) {
        for (const auto& system : sets.systems) {
          auto it = sets.sets.find({predictor, system});
          if (it == sets.sets.end()) continue;
          for (const auto& p : it->second) {
            pooled.Add(predictor, "pooled",
                       LabeledPoint{system + "/" + p.label, p.point});
          }
        }
      }
      if (pooled.systems.empty()) pooled.systems.push_back("pooled");
      sets = std::move(pooled);
    }

    Json summary = Stamped(config);
    Json predictors_json = Json::array();
    Json fits_json = Json::array();
    std::ostringstream csv_out;
    csv::Row header = {"predictor", "system", "n", "a", "b", "c", "sse", "mae"};
    header.insert(header.end(), kStampHeader.begin(), kStampHeader.end());
    csv::WriteRow(csv_out, header);
    std::size_t total_skipped = 0;

    for (const auto& predictor : config.fit.predictors) {
      Json fit_rows = Json::array();
      Json skipped = Json::array();
      double mae_total = 0.0;
      std::size_t fitted = 0;
      for (const auto& system : sets.systems) {
        auto it = sets.sets.find({predictor, system});
        std::vector<CurvePoint> points;
        if (it != sets.sets.end()) {
          for (const auto& p : it->second) points.push_back(p.point);
        }
        bool varied = false;
        for (const auto& p : points) varied |= p.x != points.front().x;
        if (points.size() < 3 || !varied) {
          console.err << "warning: skipping " << system << " / " << predictor
                      << ": " << points.size()
                      << (points.size() < 3 ? " joinable points (need 3)"
                                            : " points without predictor variation")
                      << '\n';
          skipped.push_back(system);
          ++total_skipped;
          continue;
        }
        FitOptions options;
        options.predictor = predictor;
        options.percentage = percentage;
        const FitModel model = Fit(points, options);
        mae_total += model.mae;
        ++fitted;

        const std::string base = SafeName(system) + "__" + predictor;
        Json model_json = Stamped(config);
        model_json["system"] = system;
        model_json.update(FitModelToJson(model));
        Json pts = Json::array();
        double x_max = 0.0;
        for (const auto& p : it->second) {
          x_max = std::max(x_max, p.point.x);
          pts.push_back(Json{{"label", p.label},
                             {"x", p.point.x},
                             {"observed", p.point.y},
                             {"predicted", Predict(model, p.point.x)}});
        }
        model_json["points"] = pts;
        WriteIfChanged(config.out_dir / "fit" / (base + ".json"),
                       Dump(model_json));
        std::ostringstream curve;
        WriteCurveCsv(curve, model, x_max > 0.0 ? x_max : 1.0, 101, kStampHeader,
                      StampValues(config));
        WriteIfChanged(config.out_dir / "fit" / (base + ".curve.csv"),
                       curve.str());

        Json row;
        row["system"] = system;
        row["n"] = model.n_points;
        row["a"] = model.a;
        row["b"] = model.b;
        row["c"] = model.c;
        row["sse"] = model.sse;
        row["mae"] = model.mae;
        fit_rows.push_back(row);
        Json full;
        full["system"] = system;
        full["predictor"] = predictor;
        full["model"] = FitModelToJson(model);
        full["points"] = std::move(pts);
        fits_json.push_back(std::move(full));

        csv::Row csv_row = {predictor,
                            system,
                            std::to_string(model.n_points),
                            csv::FormatDouble(model.a),
                            csv::FormatDouble(model.b),
                            csv::FormatDouble(model.c),
                            csv::FormatDouble(model.sse),
                            csv::FormatDouble(model.mae)};
        const auto stamps = StampValues(config);
        csv_row.insert(csv_row.end(), stamps.begin(), stamps.end());
        csv::WriteRow(csv_out, csv_row);
        console.out << fmt::format(
            "fit {:<8} {:<16} n={} a={:.4f} b={:.4f} c={:.4f} mae={:.4f}\n",
            predictor, system, model.n_points, model.a, model.b, model.c,
            model.mae);
      }
      Json entry;
      entry["predictor"] = predictor;
      entry["fits"] = std::move(fit_rows);
      entry["mean_mae"] =
          fitted > 0 ? Json(mae_total / static_cast<double>(fitted)) : Json(nullptr);
      entry["skipped_count"] = skipped.size();
      entry["skipped"] = std::move(skipped);
      predictors_json.push_back(std::move(entry));
    }
    summary["metric"] = config.metric;
    summary["percentage"] = percentage;
    summary["predictors"] = predictors_json;
    summary["skipped_total"] = total_skipped;
    WriteIfChanged(config.out_dir / "fit" / "mae_summary.json", Dump(summary));
    WriteIfChanged(config.out_dir / "fit" / "mae_summary.csv", csv_out.str());

    Json combined = Stamped(config);
    combined["metric"] = config.metric;
    combined["summary"] = std::move(predictors_json);
    combined["fits"] = std::move(fits_json);
    WriteIfChanged(config.out_dir / kFitsFile, Dump(combined));
    return 0;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

int CmdReport(const RunConfig& config, Console console, bool allow_partial) {
  try {
    const fs::path sim_path = config.out_dir / kSimilarityFile;
    const fs::path transport_path = config.out_dir / kTransportFile;
    const fs::path fits_path = config.out_dir / kFitsFile;
    std::vector<std::string> missing;
    if (!fs::exists(sim_path)) missing.push_back("similarity");
    if (!fs::exists(transport_path)) missing.push_back("transport");
    if (!fs::exists(fits_path)) missing.push_back("fit");
    if (missing.size() == 3 || (!missing.empty() && !allow_partial)) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw UsageError("missing stage output; run: " + list +
                       (missing.size() < 3 ? " (or pass --allow-partial)" : ""));
    }

    const std::string hash = config.Hash();
    Json report = Stamped(config);
    std::ostringstream text;
    text << "# transportkit report, config " << hash << ", tool "
         << kToolVersion << "\n";

    auto check_stale = [&](const Json& stage, const std::string& name) {
      if (stage.value("config_hash", "") != hash) {
        console.err << "warning: " << name
                    << " output was produced under a different config\n";
      }
    };

    if (fs::exists(sim_path)) {
      const Json sim = ReadJson(sim_path);
      check_stale(sim, "similarity");
      report["similarity"] = sim.at("tables");
      for (const auto& table : sim.at("tables")) {
        text << "\n## Domain similarity from "
             << table.at("source").get<std::string>() << "\n";
        text << fmt::format("{:<24} {:>8} {:>8} {:>8}\n", "target", "lexical",
                            "cosine", "kl");
        for (const auto& r : table.at("records")) {
          text << fmt::format("{:<24} {:>8.3f} {:>8.3f} {:>8.3f}\n",
                              r.at("target").get<std::string>(),
                              r.at("lexical").get<double>(),
                              r.at("cosine").get<double>(),
                              r.at("kl").get<double>());
        }
      }
    } else {
      report["similarity"] = "absent";
      text << "\n## Domain similarity\nsimilarity: absent\n";
    }

    if (fs::exists(transport_path)) {
      const Json transport = ReadJson(transport_path);
      check_stale(transport, "transport");
      report["transport"] = transport.at("reports");
      text << "\n## Transportability (" << transport.at("metric").get<std::string>()
           << ")\n";
      const std::string rendered = ReadBytes(config.out_dir / kTransportText);
      text << rendered.substr(rendered.find('\n') + 1);
    } else {
      report["transport"] = "absent";
      text << "\n## Transportability\ntransport: absent\n";
    }

    if (fs::exists(fits_path)) {
      const Json fits = ReadJson(fits_path);
      check_stale(fits, "fit");
      report["fits"] = fits.at("summary");
      text << "\n## Fitted curves y = a exp(-b x) + c\n";
      text << fmt::format("{:<8} {:<16} {:>3} {:>10} {:>10} {:>10} {:>8}\n",
                          "measure", "system", "n", "a", "b", "c", "mae");
      std::map<std::string, std::ostringstream> plots;
      for (const auto& f : fits.at("fits")) {
        const std::string predictor = f.at("predictor").get<std::string>();
        const std::string system = f.at("system").get<std::string>();
        const auto& m = f.at("model");
        text << fmt::format("{:<8} {:<16} {:>3} {:>10.4f} {:>10.4f} {:>10.4f} {:>8.3f}\n",
                            predictor, system, m.at("n").get<std::size_t>(),
                            m.at("a").get<double>(), m.at("b").get<double>(),
                            m.at("c").get<double>(), m.at("mae").get<double>());
        auto& plot = plots[predictor];
        if (plot.tellp() == 0) {
          csv::Row header = {"system", "target", "x", "observed", "predicted"};
          header.insert(header.end(), kStampHeader.begin(), kStampHeader.end());
          csv::WriteRow(plot, header);
        }
        for (const auto& p : f.at("points")) {
          csv::Row row = {system, p.at("label").get<std::string>(),
                          csv::FormatDouble(p.at("x").get<double>()),
                          csv::FormatDouble(p.at("observed").get<double>()),
                          csv::FormatDouble(p.at("predicted").get<double>())};
          const auto stamps = StampValues(config);
          row.insert(row.end(), stamps.begin(), stamps.end());
          csv::WriteRow(plot, row);
        }
      }
      for (const auto& s : fits.at("summary")) {
        if (!s.at("mean_mae").is_null()) {
          text << fmt::format("mean mae ({}): {:.3f}\n",
                              s.at("predictor").get<std::string>(),
                              s.at("mean_mae").get<double>());
        }
      }
      Json plot_files = Json::array();
      for (const auto& [predictor, plot] : plots) {
        const fs::path rel = fs::path("plots") / (SafeName(predictor) + ".csv");
        WriteIfChanged(config.out_dir / rel, plot.str());
        plot_files.push_back(rel.generic_string());
      }
      report["plots"] = std::move(plot_files);
    } else {
      report["fits"] = "absent";
      text << "\n## Fitted curves\nfit: absent\n";
    }

    WriteIfChanged(config.out_dir / "report.json", Dump(report));
    WriteIfChanged(config.out_dir / "report.txt", text.str());
    console.out << text.str();
    return 0;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

int CmdPredict(const fs::path& model_path, double x, Console console) {
  try {
    if (!std::isfinite(x) || x < 0.0) {
      throw UsageError("similarity value must be finite and >= 0");
    }
    const FitModel model = FitModelFromJson(nlohmann::json(ReadJson(model_path)));
    console.out << csv::FormatDouble(Predict(model, x)) << '\n';
    return 0;
  } catch (const Error& e) {
    return Fail(console, e);
  }
}

}  // namespace transportkit::pipeline
