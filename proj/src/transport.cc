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

#include "transportkit/transport.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include <fmt/format.h>

#include "transportkit/csv.h"
#include "transportkit/error.h"

namespace transportkit {

namespace {

std::string EntryKey(std::string_view system, std::string_view task,
                     std::string_view dataset, std::string_view split) {
  std::string key;
  for (std::string_view part : {system, task, dataset, split}) {
    key += std::to_string(part.size());
    key += ':';
    key += part;
  }
  return key;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<double> Ratios(double source_score,
                           std::span<const double> target_scores) {
  std::vector<double> ratios;
  ratios.reserve(target_scores.size());
  for (double t : target_scores) ratios.push_back(TauPPair(source_score, t));
  return ratios;
}

double Mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

// 100 x sample standard deviation / mean.
double CoefficientOfVariationPercent(std::span<const double> ratios) {
  const double mean = Mean(ratios);
  if (mean == 0.0) {
    throw NumericalError("variation undefined for a zero mean ratio");
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  if (*lo == *hi) return 0.0;
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / static_cast<double>(ratios.size() - 1));
  return 100.0 * sd / mean;
}

}  // namespace

SplitKey SplitKey::Parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == text.size()) {
    throw UsageError("expected 'dataset:split', got '" + std::string(text) +
                     "'");
  }
  return SplitKey{std::string(text.substr(0, colon)),
                  std::string(text.substr(colon + 1))};
}

bool IsPercentageMetric(std::string_view metric_name) {
  const std::string m = Lower(metric_name);
  return m == "f1" || m == "accuracy";
}

ScoreTable::ScoreTable(std::string metric_name, std::vector<ScoreEntry> entries)
    : metric_name_(std::move(metric_name)), entries_(std::move(entries)) {
  const bool percent = IsPercentageMetric(metric_name_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const ScoreEntry& e = entries_[i];
    const std::string where = "score entry (" + e.system + ", " + e.task +
                              ", " + e.dataset + ", " + e.split + ")";
    if (e.system.empty() || e.task.empty() || e.dataset.empty()) {
      throw DataError(where + ": empty identifier");
    }
    if (e.split.empty()) throw DataError(where + ": empty split");
    if (!std::isfinite(e.score) || e.score < 0.0) {
      throw DataError(where + ": score must be finite and >= 0");
    }
    if (percent && e.score > 100.0) {
      throw DataError(where + ": " + metric_name_ +
                      " score must lie in [0, 100]");
    }
    if (!index_.emplace(EntryKey(e.system, e.task, e.dataset, e.split), i)
             .second) {
      throw DataError("duplicate " + where);
    }
  }
}

std::optional<double> ScoreTable::Find(std::string_view system,
                                       std::string_view task,
                                       const SplitKey& key) const {
  auto it = index_.find(EntryKey(system, task, key.dataset, key.split));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].score;
}

double ScoreTable::Get(std::string_view system, std::string_view task,
                       const SplitKey& key) const {
  if (auto score = Find(system, task, key)) return *score;
  throw DataError("no score for system '" + std::string(system) +
                  "', task '" + std::string(task) + "', key '" +
                  key.ToString() + "'");
}

std::vector<std::string> ScoreTable::Systems() const {
  std::vector<std::string> systems;
  for (const auto& e : entries_) {
    if (std::find(systems.begin(), systems.end(), e.system) == systems.end()) {
      systems.push_back(e.system);
    }
  }
  return systems;
}

ScoreTable ReadScoreTableCsv(std::string_view text,
                             const std::string& default_metric) {
  const auto rows = csv::Parse(text);
  if (rows.empty()) throw DataError("score table: empty CSV");
  const csv::Row& header = rows.front();
  const csv::Row expected = {"system", "task", "dataset", "split", "score"};
  const bool has_metric = header.size() == 6 && header[5] == "metric";
  if (header.size() < 5 ||
      !std::equal(expected.begin(), expected.end(), header.begin()) ||
      (header.size() > 5 && !has_metric)) {
    throw DataError(
        "score table: expected header system,task,dataset,split,score"
        "[,metric]");
  }
  std::string metric = default_metric;
  std::vector<ScoreEntry> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    const std::string where = "score table row " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(row.size()));
    }
    if (has_metric) {
      if (r == 1) {
        metric = row[5];
      } else if (row[5] != metric) {
        throw DataError(where + ": mixed metrics in one score table ('" +
                        metric + "' and '" + row[5] + "')");
      }
    }
    entries.push_back(ScoreEntry{row[0], row[1], row[2], row[3],
                                 csv::ParseDouble(row[4], where)});
  }
  return ScoreTable(metric, std::move(entries));
}

ScoreTable ReadScoreTableJson(const nlohmann::json& j,
                              const std::string& default_metric) {
  try {
    std::vector<ScoreEntry> entries;
    for (const auto& e : j.at("entries")) {
      entries.push_back(ScoreEntry{
          e.at("system").get<std::string>(), e.at("task").get<std::string>(),
          e.at("dataset").get<std::string>(), e.at("split").get<std::string>(),
          e.at("score").get<double>()});
    }
    return ScoreTable(j.value("metric", default_metric), std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("score table JSON: ") + e.what());
  }
}

ScoreTable LoadScoreTable(const std::string& path,
                          const std::string& default_metric) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open score table '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '{') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
      }
      return ReadScoreTableJson(j, default_metric);
    }
    return ReadScoreTableCsv(text, default_metric);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

double TauPPair(double source_score, double target_score) {
  if (!std::isfinite(source_score) || !std::isfinite(target_score)) {
    throw NumericalError("non-finite score");
  }
  if (source_score <= 0.0) {
    throw NumericalError(
        "undefined transport ratio (zero-performance source)");
  }
  if (target_score < 0.0) throw UsageError("negative target score");
  return target_score / source_score;
}

double TauPMean(double source_score, std::span<const double> target_scores) {
  if (target_scores.empty()) throw UsageError("empty target list");
  const auto ratios = Ratios(source_score, target_scores);
  return Mean(ratios);
}

double TauVar(double source_score, std::span<const double> target_scores,
              bool bias_corrected) {
  if (target_scores.size() < 2) {
    throw UsageError("variation undefined for fewer than 2 targets");
  }
  const auto ratios = Ratios(source_score, target_scores);
  const double cov = CoefficientOfVariationPercent(ratios);
  if (!bias_corrected) return cov;
  const double n = static_cast<double>(ratios.size());
  return (1.0 + 1.0 / (4.0 * n)) * cov;
}

double TauVarGeneral(std::span<const TaskDomainRatio> records) {
  if (records.size() < 2) {
    throw UsageError("variation undefined for fewer than 2 records");
  }
  std::vector<double> ratios;
  ratios.reserve(records.size());
  for (const auto& r : records) {
    if (r.metric != records.front().metric) {
      throw UsageError("incomparable metrics: '" + records.front().metric +
                       "' and '" + r.metric + "'");
    }
    if (!std::isfinite(r.ratio)) throw NumericalError("non-finite ratio");
    ratios.push_back(r.ratio);
  }
  return CoefficientOfVariationPercent(ratios);
}

TransportReport BuildReport(const ScoreTable& table, const std::string& system,
                            const std::string& task, const SplitKey& source,
                            const std::vector<SplitKey>& targets,
                            const ReportOptions& options) {
  if (targets.empty()) throw UsageError("empty target list");
  TransportReport report;
  report.system = system;
  report.task = task;
  report.metric = table.metric_name();
  report.source = source;
  report.source_score = table.Get(system, task, source);
  report.bias_corrected = options.bias_corrected;

  std::vector<double> target_scores;
  for (const auto& key : targets) {
    const double score = table.Get(system, task, key);
    target_scores.push_back(score);
    report.per_target.push_back(
        TargetRatio{key, score, TauPPair(report.source_score, score)});
  }
  report.n = report.per_target.size();
  report.tau_p_mean = TauPMean(report.source_score, target_scores);

  for (const auto& group : options.groups) {
    std::vector<double> member_scores;
    for (const auto& member : group.members) {
      auto it = std::find(targets.begin(), targets.end(), member);
      if (it == targets.end()) {
        throw UsageError("group '" + group.name + "' member '" +
                         member.ToString() + "' is not a target");
      }
      member_scores.push_back(
          target_scores[static_cast<std::size_t>(it - targets.begin())]);
    }
    report.groups.push_back(GroupMean{
        group.name, group.members, TauPMean(report.source_score, member_scores)});
  }

  if (target_scores.size() < 2) {
    report.tau_var_error = "variation undefined for fewer than 2 targets";
  } else {
    report.tau_var =
        TauVar(report.source_score, target_scores, options.bias_corrected);
  }
  return report;
}

nlohmann::ordered_json ReportToJson(const TransportReport& report) {
  nlohmann::ordered_json j;
  j["system"] = report.system;
  j["task"] = report.task;
  j["metric"] = report.metric;
  j["source"] = report.source.ToString();
  j["source_score"] = report.source_score;
  nlohmann::ordered_json targets = nlohmann::ordered_json::array();
  for (const auto& t : report.per_target) {
    nlohmann::ordered_json row;
    row["target"] = t.target.ToString();
    row["score"] = t.target_score;
    row["tau_p"] = t.tau_p;
    targets.push_back(std::move(row));
  }
  j["per_target"] = std::move(targets);
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : report.groups) {
    nlohmann::ordered_json row;
    row["name"] = g.name;
    nlohmann::ordered_json members = nlohmann::ordered_json::array();
    for (const auto& m : g.members) members.push_back(m.ToString());
    row["members"] = std::move(members);
    row["tau_p"] = g.tau_p;
    groups.push_back(std::move(row));
  }
  j["groups"] = std::move(groups);
  j["tau_p_mean"] = report.tau_p_mean;
  if (report.tau_var) {
    j["tau_var"] = *report.tau_var;
  } else {
    j["tau_var"] = nullptr;
    j["tau_var_error"] = report.tau_var_error;
  }
  j["bias_corrected"] = report.bias_corrected;
  j["n"] = report.n;
  return j;
}

void RenderTransportTable(std::ostream& out,
                          const std::vector<TransportReport>& reports) {
  std::vector<std::string> row_labels;
  for (const auto& r : reports) {
    for (const auto& g : r.groups) {
      const std::string label = "tau_p(" + g.name + ")";
      if (std::find(row_labels.begin(), row_labels.end(), label) ==
          row_labels.end()) {
        row_labels.push_back(label);
      }
    }
  }
  row_labels.push_back("tau_p");
  row_labels.push_back("tau_var");

  std::size_t label_width = 0;
  for (const auto& l : row_labels) label_width = std::max(label_width, l.size());
  std::vector<std::size_t> widths;
  for (const auto& r : reports) widths.push_back(std::max<std::size_t>(r.system.size(), 8));

  out << fmt::format("{:<{}}", "", label_width);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << "  " << fmt::format("{:>{}}", reports[i].system, widths[i]);
  }
  out << '\n';
  for (const auto& label : row_labels) {
    out << fmt::format("{:<{}}", label, label_width);
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const TransportReport& r = reports[i];
      std::string cell = "-";
      if (label == "tau_p") {
        cell = fmt::format("{:.3f}", r.tau_p_mean);
      } else if (label == "tau_var") {
        cell = r.tau_var ? fmt::format("{:.3f}", *r.tau_var) : "undefined";
      } else {
        for (const auto& g : r.groups) {
          if ("tau_p(" + g.name + ")" == label) {
            cell = fmt::format("{:.3f}", g.tau_p);
          }
        }
      }
      out << "  " << fmt::format("{:>{}}", cell, widths[i]);
    }
    out << '\n';
  }
}

}  // namespace transportkit
