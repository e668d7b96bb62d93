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

#ifndef TRANSPORTKIT_PIPELINE_COMMANDS_H_
#define TRANSPORTKIT_PIPELINE_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "transportkit/pipeline/config.h"

namespace transportkit::pipeline {

constexpr const char* kToolVersion = TRANSPORTKIT_VERSION;

// Streams for progress messages and diagnostics.
struct Console {
  std::ostream& out;
  std::ostream& err;
};

// Each stage returns a process exit code: 0 success, 1 usage/config error,
// 2 data/parse error, 3 numerical failure. Stage outputs go under
// config.out_dir and are only rewritten when their bytes change.
int CmdIngest(const RunConfig& config, Console console);
int CmdSimilarity(const RunConfig& config, Console console);
int CmdTransport(const RunConfig& config, Console console);
int CmdFit(const RunConfig& config, Console console);
int CmdReport(const RunConfig& config, Console console, bool allow_partial);

// Loads a saved FitModel and prints one predicted score.
int CmdPredict(const std::filesystem::path& model_path, double x,
               Console console);

// Holds <out>/.transportkit.lock for its lifetime; a second holder fails
// with a usage error.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& out_dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

// Writes only when the content differs. Returns true if the file changed.
bool WriteIfChanged(const std::filesystem::path& path,
                    const std::string& content);

}  // namespace transportkit::pipeline

#endif  // TRANSPORTKIT_PIPELINE_COMMANDS_H_
