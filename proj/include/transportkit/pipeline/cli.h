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

#ifndef TRANSPORTKIT_PIPELINE_CLI_H_
#define TRANSPORTKIT_PIPELINE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace transportkit::pipeline {

// Entry point of the command-line tool. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace transportkit::pipeline

#endif  // TRANSPORTKIT_PIPELINE_CLI_H_
