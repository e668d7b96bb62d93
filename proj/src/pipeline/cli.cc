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

#include "transportkit/pipeline/cli.h"

#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "transportkit/error.h"
#include "transportkit/pipeline/commands.h"
#include "transportkit/pipeline/config.h"

namespace transportkit::pipeline {

namespace {

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Transportability metrics, domain similarity and performance "
               "prediction for NLP evaluation."};
  app.name("transportkit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> source;
  std::optional<std::string> targets;
  std::optional<std::string> predictor;
  std::optional<std::string> kl_direction;
  std::optional<double> kl_epsilon;
  bool bias_corrected = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool allow_partial = false;
  std::optional<std::string> model_path;
  std::optional<double> predict_x;

  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--source", source,
                 "Similarity: source corpus id. Transport: dataset:split");
  app.add_option("--targets", targets,
                 "Comma-separated targets (corpus ids or dataset:split)");
  app.add_option("--predictor", predictor, "Fit only this measure")
      ->check(CLI::IsMember({"lexical", "cosine", "kl"}));
  app.add_option("--kl-direction", kl_direction, "forward or reverse")
      ->check(CLI::IsMember({"forward", "reverse"}));
  app.add_option("--kl-epsilon", kl_epsilon, "KL smoothing constant");
  app.add_flag("--bias-corrected", bias_corrected,
               "Apply the (1 + 1/4n) factor to tau_var");
  app.add_option("--seed", seed, "Built-in embedding seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--allow-partial", allow_partial,
               "report: mark missing stages as absent instead of failing");
  app.add_option("--model", model_path, "fit: saved model for predict-only mode");
  app.add_option("--x", predict_x, "fit: similarity value to predict at");

  const std::vector<std::string> stages = {"ingest", "similarity", "transport",
                                           "fit", "report", "run"};
  for (const auto& stage : stages) {
    app.add_subcommand(stage, stage == "run" ? "Run every configured stage"
                                             : "Run the " + stage + " stage");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 1;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  const Console console{out, err};

  if (stage == "fit" && (model_path || predict_x)) {
    if (!model_path || !predict_x) {
      err << "usage error: predict-only mode needs both --model and --x\n";
      return 1;
    }
    return CmdPredict(*model_path, *predict_x, console);
  }
  if (config_path.empty()) {
    err << "usage error: --config is required\n";
    return 1;
  }

  try {
    RunConfig config = LoadRunConfig(config_path);
    Overrides overrides;
    overrides.source = source;
    if (targets) overrides.targets = SplitList(*targets);
    overrides.predictor = predictor;
    overrides.kl_direction = kl_direction;
    overrides.kl_epsilon = kl_epsilon;
    overrides.bias_corrected = bias_corrected;
    overrides.seed = seed;
    if (out_dir) overrides.out = *out_dir;
    ApplyOverrides(config, overrides, stage);

    OutputLock lock(config.out_dir);
    if (stage == "ingest") return CmdIngest(config, console);
    if (stage == "similarity") return CmdSimilarity(config, console);
    if (stage == "transport") return CmdTransport(config, console);
    if (stage == "fit") return CmdFit(config, console);
    if (stage == "report") return CmdReport(config, console, allow_partial);

    // run: every stage the config has inputs for.
    if (!config.corpora.empty()) {
      if (int rc = CmdIngest(config, console); rc != 0) return rc;
    }
    if (!config.similarity.empty()) {
      if (int rc = CmdSimilarity(config, console); rc != 0) return rc;
    }
    if (!config.transport.empty()) {
      if (int rc = CmdTransport(config, console); rc != 0) return rc;
    }
    if (config.fit.points ||
        (!config.similarity.empty() && !config.transport.empty())) {
      if (int rc = CmdFit(config, console); rc != 0) return rc;
    }
    return CmdReport(config, console, true);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace transportkit::pipeline
