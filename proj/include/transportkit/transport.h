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

#ifndef TRANSPORTKIT_TRANSPORT_H_
#define TRANSPORTKIT_TRANSPORT_H_

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace transportkit {

// A dataset split, written "dataset:split" in configs and reports.
struct SplitKey {
  std::string dataset;
  std::string split;

  std::string ToString() const { return dataset + ":" + split; }
  static SplitKey Parse(std::string_view text);

  friend auto operator<=>(const SplitKey&, const SplitKey&) = default;
};

// One performance measurement p(system, task, dataset).
struct ScoreEntry {
  std::string system;
  std::string task;
  std::string dataset;
  std::string split;
  double score = 0.0;
};

class ScoreTable {
 public:
  // Rejects duplicate keys, empty splits and non-finite or negative scores;
  // F1 and accuracy scores must lie in [0, 100].
  ScoreTable(std::string metric_name, std::vector<ScoreEntry> entries);

  const std::string& metric_name() const { return metric_name_; }
  const std::vector<ScoreEntry>& entries() const { return entries_; }

  std::optional<double> Find(std::string_view system, std::string_view task,
                             const SplitKey& key) const;
  // Throws a data error naming the missing key.
  double Get(std::string_view system, std::string_view task,
             const SplitKey& key) const;

  // Systems in first-appearance order.
  std::vector<std::string> Systems() const;

 private:
  std::string metric_name_;
  std::vector<ScoreEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

bool IsPercentageMetric(std::string_view metric_name);

// CSV header: system,task,dataset,split,score[,metric]. A metric column,
// when present, must hold a single value and overrides default_metric.
ScoreTable ReadScoreTableCsv(std::string_view text,
                             const std::string& default_metric);
// {"metric": "F1", "entries": [{"system": ..., "task": ..., "dataset": ...,
//   "split": ..., "score": ...}, ...]}
ScoreTable ReadScoreTableJson(const nlohmann::json& j,
                              const std::string& default_metric);
// Dispatches on content (JSON object vs CSV).
ScoreTable LoadScoreTable(const std::string& path,
                          const std::string& default_metric);

// p(target) / p(source). Throws a numerical error for a source score <= 0.
double TauPPair(double source_score, double target_score);

// Mean of the per-target ratios.
double TauPMean(double source_score, std::span<const double> target_scores);

// 100 x sample coefficient of variation of the per-target ratios, times
// (1 + 1/4n) when bias_corrected.
double TauVar(double source_score, std::span<const double> target_scores,
              bool bias_corrected = false);

struct TaskDomainRatio {
  std::string task;
  std::string dataset;
  double ratio = 0.0;
  std::string metric;
};

// 100 x sample coefficient of variation over task-domain ratios; no bias
// term. All records must share one metric.
double TauVarGeneral(std::span<const TaskDomainRatio> records);

struct TargetGroup {
  std::string name;
  std::vector<SplitKey> members;
};

struct ReportOptions {
  bool bias_corrected = false;
  // Named subsets of the targets whose mean ratio is reported separately.
  std::vector<TargetGroup> groups;
};

struct TargetRatio {
  SplitKey target;
  double target_score = 0.0;
  double tau_p = 0.0;
};

struct GroupMean {
  std::string name;
  std::vector<SplitKey> members;
  double tau_p = 0.0;
};

struct TransportReport {
  std::string system;
  std::string task;
  std::string metric;
  SplitKey source;
  double source_score = 0.0;
  std::vector<TargetRatio> per_target;
  std::vector<GroupMean> groups;
  double tau_p_mean = 0.0;
  // Percent. Empty when undefined (fewer than two targets); the reason is
  // kept in tau_var_error.
  std::optional<double> tau_var;
  std::string tau_var_error;
  bool bias_corrected = false;
  std::size_t n = 0;
};

TransportReport BuildReport(const ScoreTable& table, const std::string& system,
                            const std::string& task, const SplitKey& source,
                            const std::vector<SplitKey>& targets,
                            const ReportOptions& options = {});

nlohmann::ordered_json ReportToJson(const TransportReport& report);

// Aligned text table with one column per report: group ratios, overall
// mean ratio, then tau_var.
void RenderTransportTable(std::ostream& out,
                          const std::vector<TransportReport>& reports);

}  // namespace transportkit

#endif  // TRANSPORTKIT_TRANSPORT_H_
