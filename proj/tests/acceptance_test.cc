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

// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance_test [--real-data DIR]
//
// DIR, when given, must hold conll_train, conll_dev, conll_test, wiki,
// wnut_train, wnut_dev and wnut_test, each with the .conll extension.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"
#include "oracles.h"
#include "transportkit/corpus.h"
#include "transportkit/csv.h"
#include "transportkit/divergence.h"
#include "transportkit/features.h"
#include "transportkit/pipeline/cli.h"
#include "transportkit/regression.h"
#include "transportkit/transport.h"

namespace transportkit {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = TRANSPORTKIT_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
  bool skipped = false;

  // Records a failed check; keeps going so every problem is reported.
  void Expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

// Same generator as the unit tests, kept local so this binary stands alone.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed) {}
  double Uniform(double lo, double hi) {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return lo + (hi - lo) * (static_cast<std::uint32_t>(state_ >> 32) / 4294967296.0);
  }
  std::uint32_t Below(std::uint32_t n) {
    return static_cast<std::uint32_t>(Uniform(0.0, 1.0) * n);
  }

 private:
  std::uint64_t state_;
};

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("transportkit_accept_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the transport stage on a fixture config and returns reports by system.
std::map<std::string, nlohmann::json> Transport(const std::string& config,
                                                bool bias_corrected) {
  TempDir tmp(bias_corrected ? "bc" : "plain");
  std::vector<std::string> args = {"transport", "--config",
                                   (kFixtures / "configs" / config).string(),
                                   "--out", tmp.path().string()};
  if (bias_corrected) args.push_back("--bias-corrected");
  std::ostringstream out;
  std::ostringstream err;
  if (pipeline::RunCli(args, out, err) != 0) {
    throw std::runtime_error("transport stage failed: " + err.str());
  }
  const auto j = nlohmann::json::parse(Slurp(tmp.path() / "transport/transport.json"));
  std::map<std::string, nlohmann::json> by_system;
  for (const auto& r : j.at("reports")) by_system[r.at("system")] = r;
  return by_system;
}

double Group(const nlohmann::json& report, const std::string& name) {
  for (const auto& g : report.at("groups")) {
    if (g.at("name") == name) return g.at("tau_p").get<double>();
  }
  throw std::runtime_error("missing group " + name);
}

bool Near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

std::string Num(double v) { return fmt::format("{:.4f}", v); }

Outcome TableSeven() {
  struct Row {
    const char* system;
    double wiki, wnut, both, var;
  };
  const Row rows[] = {{"Stanford", 0.671, 0.514, 0.553, 15.05},
                      {"SpaCy", 0.524, 0.287, 0.346, 35.17},
                      {"ELMo", 0.794, 0.477, 0.556, 32.67}};
  Outcome o;
  const auto plain = Transport("ner_transport.json", false);
  const auto corrected = Transport("ner_transport.json", true);
  for (const Row& row : rows) {
    const auto& r = plain.at(row.system);
    const double wiki = Group(r, "wiki");
    const double wnut = Group(r, "wnut");
    const double both = Group(r, "wnut & wiki");
    const double var = r.at("tau_var").get<double>();
    const std::string s = row.system;
    o.Expect(Near(wiki, row.wiki, 0.005), s + " tau_p(wiki)=" + Num(wiki));
    o.Expect(Near(wnut, row.wnut, 0.005), s + " tau_p(wnut)=" + Num(wnut));
    o.Expect(Near(both, row.both, 0.005), s + " tau_p(wnut&wiki)=" + Num(both));
    o.Expect(Near(r.at("tau_p_mean").get<double>(), row.both, 0.005), s + " tau_p mean");
    o.Expect(Near(var, row.var, 0.1), s + " tau_var=" + Num(var));
    const double bc = corrected.at(row.system).at("tau_var").get<double>();
    o.Expect(!Near(bc, row.var, 0.1),
             s + " bias-corrected tau_var unexpectedly matches: " + Num(bc));
    o.detail += (o.detail.empty() ? "" : ", ") +
                fmt::format("{} {:.3f}/{:.3f}/{:.3f}/{:.2f} (corrected {:.2f})",
                            s, wiki, wnut, both, var, bc);
  }
  return o;
}

Outcome TableEight() {
  struct Row {
    const char* system;
    double tau_p, tau_p_tol, var, var_tol;
  };
  const Row rows[] = {{"BERT-snli", 0.646, 0.005, 15.2, 0.2},
                      {"BERT-multinli", 0.744, 0.005, 8.58, 0.1},
                      {"BERT-scitail", 0.446, 0.005, 3.92, 0.1}};
  Outcome o;
  const auto reports = Transport("nli_transport.json", false);
  for (const Row& row : rows) {
    const auto& r = reports.at(row.system);
    const double tp = r.at("tau_p_mean").get<double>();
    const double var = r.at("tau_var").get<double>();
    o.Expect(Near(tp, row.tau_p, row.tau_p_tol), std::string(row.system) + " tau_p=" + Num(tp));
    o.Expect(Near(var, row.var, row.var_tol), std::string(row.system) + " tau_var=" + Num(var));
    o.detail += (o.detail.empty() ? "" : ", ") +
                fmt::format("{} {:.3f}/{:.3f}", row.system, tp, var);
  }
  return o;
}

// Mean in-sample MAE of per-system fits for one predictor of a figure file.
double FigureMae(const std::string& file, const std::string& predictor) {
  const auto rows = csv::Parse(Slurp(kFixtures / "figures" / file));
  std::map<std::string, std::vector<CurvePoint>> by_system;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] != predictor) continue;
    by_system[rows[i][0]].push_back(
        {csv::ParseDouble(rows[i][2], "x"), csv::ParseDouble(rows[i][3], "y")});
  }
  if (by_system.empty()) throw std::runtime_error("no points for " + predictor);
  double total = 0.0;
  for (const auto& [system, pts] : by_system) {
    FitOptions options;
    options.predictor = predictor;
    options.percentage = true;
    total += Fit(pts, options).mae;
  }
  return total / static_cast<double>(by_system.size());
}

Outcome Plausibility() {
  Outcome o;
  const struct {
    const char* label;
    const char* file;
    const char* predictor;
  } figures[] = {{"NER cosine", "ner_figure3.csv", "cosine"},
                 {"NER kl", "ner_figure3.csv", "kl"},
                 {"NLI cosine", "nli_figure4.csv", "cosine"},
                 {"NLI kl", "nli_figure4.csv", "kl"}};
  for (const auto& f : figures) {
    const double mae = FigureMae(f.file, f.predictor);
    o.Expect(mae <= 6.0, std::string(f.label) + " mae=" + Num(mae));
    o.detail += (o.detail.empty() ? "" : ", ") + fmt::format("{} mae {:.3f}", f.label, mae);
  }
  return o;
}

// Oracle: oracle::ZoomLattice. A 61^3 uniform lattice over a in [-200, 200],
// b in [0, 10], c in [-100, 200], then local 11^3 lattices around the four
// best nodes, halving the box whenever a round does not improve.
Outcome OptimizerOracle() {
  Outcome o;
  Lcg rng(20260101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.Uniform(10.0, 60.0);
    const double b = rng.Uniform(0.3, 3.0);
    const double c = rng.Uniform(20.0, 60.0);
    const int n = 4 + static_cast<int>(rng.Below(3));
    std::vector<CurvePoint> pts;
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < n; ++i) {
      const double x = rng.Uniform(0.0, 3.0);
      const double y = a * std::exp(-b * x) + c + rng.Uniform(-3.0, 3.0);
      pts.push_back({x, y});
      pairs.emplace_back(x, y);
    }
    const FitModel m = Fit(pts);
    const auto [best, lattice] =
        oracle::ZoomLattice(pairs, {-200.0, 200.0}, {0.0, 10.0}, {-100.0, 200.0});
    (void)best;
    const double ratio = m.sse / std::max(lattice, 1e-300);
    worst = std::max(worst, ratio);
    o.Expect(m.sse <= 1.01 * lattice + 1e-12,
             fmt::format("dataset {} fit sse {:.6g} lattice sse {:.6g}", trial, m.sse, lattice));
  }
  o.detail += (o.detail.empty() ? "" : ", ") +
              fmt::format("worst fit/lattice sse ratio {:.6f} over 20 datasets", worst);
  return o;
}

Outcome ExactRecovery() {
  Outcome o;
  Lcg rng(777);
  double worst_param = 0.0;
  double worst_sse = 0.0;
  for (int draw = 0; draw < 5; ++draw) {
    const CurveParams truth{rng.Uniform(10.0, 80.0), rng.Uniform(0.3, 3.0),
                            rng.Uniform(10.0, 50.0)};
    std::vector<CurvePoint> pts;
    for (int i = 0; i < 7; ++i) {
      const double x = 0.5 * i;
      pts.push_back({x, truth.a * std::exp(-truth.b * x) + truth.c});
    }
    const FitModel m = Fit(pts);
    const double err = std::max({std::abs(m.a - truth.a), std::abs(m.b - truth.b),
                                 std::abs(m.c - truth.c)});
    worst_param = std::max(worst_param, err);
    worst_sse = std::max(worst_sse, m.sse);
    o.Expect(err < 1e-4, fmt::format("draw {} parameter error {:.3g}", draw, err));
    o.Expect(m.sse < 1e-8, fmt::format("draw {} sse {:.3g}", draw, m.sse));
  }
  o.detail += (o.detail.empty() ? "" : ", ") +
              fmt::format("max parameter error {:.3g}, max sse {:.3g}", worst_param, worst_sse);
  return o;
}

Outcome DivergenceSuite() {
  Outcome o;
  Lcg rng(4242);
  const int pairs = 10000;
  int kl_bad = 0, self_bad = 0, sym_bad = 0, unit_bad = 0;
  for (int i = 0; i < pairs; ++i) {
    const std::size_t n = 2 + rng.Below(60);
    std::vector<double> u(n), v(n);
    for (double& x : u) x = rng.Uniform(-5.0, 5.0);
    for (double& x : v) x = rng.Uniform(-5.0, 5.0);
    KlSettings settings;
    if (i % 2) settings.conversion = KlConversion::kSoftmax;
    if (i % 3 == 2) settings.direction = KlDirection::kReverse;
    if (!(KlDivergence(u, v, settings) >= 0.0)) ++kl_bad;
    if (KlDivergence(u, u, settings) != 0.0) ++self_bad;
    if (CosineDistance(u, v) != CosineDistance(v, u)) ++sym_bad;
    Normalize(u);
    if (CosineDistance(u, u) != 0.0) ++unit_bad;
  }
  o.Expect(kl_bad == 0, fmt::format("{} negative KL values", kl_bad));
  o.Expect(self_bad == 0, fmt::format("{} non-zero KL(v,v)", self_bad));
  o.Expect(sym_bad == 0, fmt::format("{} asymmetric cosine values", sym_bad));
  o.Expect(unit_bad == 0, fmt::format("{} non-zero cosine on identical unit vectors", unit_bad));

  using Set = std::set<std::string>;
  o.Expect(LexicalDifference(Set{"a"}, Set{"a", "b"}) == 0.5 &&
               LexicalDifference(Set{"a", "b"}, Set{"a"}) == 0.0,
           "asymmetry example");
  int oracle_bad = 0, range_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Set a, b;
    const auto na = 1 + rng.Below(10), nb = 1 + rng.Below(10);
    for (unsigned k = 0; k < na; ++k) a.insert("t" + std::to_string(rng.Below(14)));
    for (unsigned k = 0; k < nb; ++k) b.insert("t" + std::to_string(rng.Below(14)));
    const std::vector<std::string> va(a.begin(), a.end()), vb(b.begin(), b.end());
    const double want = 1.0 - static_cast<double>(oracle::NaiveIntersection(va, vb)) /
                                  static_cast<double>(vb.size());
    const double got = LexicalDifference(a, b);
    if (got != want) ++oracle_bad;
    if (got < 0.0 || got > 1.0) ++range_bad;
  }
  o.Expect(oracle_bad == 0, fmt::format("{} lexical oracle mismatches", oracle_bad));
  o.Expect(range_bad == 0, fmt::format("{} lexical values outside [0,1]", range_bad));
  if (o.pass) {
    o.detail = fmt::format("{} vector pairs, 100 vocabularies", pairs);
  }
  return o;
}

Outcome TrivialSystem() {
  Outcome o;
  std::vector<ScoreEntry> entries;
  for (const char* ds : {"home", "d1", "d2", "d3", "d4", "d5"}) {
    entries.push_back({"constant", "task", ds, "test", 73.25});
  }
  const ScoreTable table("F1", entries);
  std::vector<SplitKey> targets;
  for (const char* ds : {"d1", "d2", "d3", "d4", "d5"}) targets.push_back({ds, "test"});
  for (bool bc : {false, true}) {
    ReportOptions options;
    options.bias_corrected = bc;
    const TransportReport r =
        BuildReport(table, "constant", "task", {"home", "test"}, targets, options);
    for (const auto& t : r.per_target) {
      o.Expect(t.tau_p == 1.0, "tau_p(" + t.target.ToString() + ")=" + Num(t.tau_p));
    }
    o.Expect(r.tau_p_mean == 1.0, "tau_p mean=" + Num(r.tau_p_mean));
    o.Expect(r.tau_var.has_value() && *r.tau_var == 0.0,
             fmt::format("tau_var not exactly 0 (bias_corrected={})", bc));
  }
  if (o.pass) o.detail = "tau_p = 1 on 5 targets, tau_var = 0 exactly";
  return o;
}

Outcome Determinism() {
  Outcome o;
  TempDir one("det1");
  TempDir two("det2");
  const std::string config = (kFixtures / "configs/ner_pipeline.json").string();
  for (const fs::path* dir : {&one.path(), &two.path()}) {
    std::ostringstream out, err;
    const int rc = pipeline::RunCli({"run", "--config", config, "--out", dir->string()},
                                    out, err);
    o.Expect(rc == 0, "run failed: " + err.str());
  }
  auto tree = [](const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = Slurp(e.path());
    }
    return files;
  };
  const auto a = tree(one.path());
  const auto b = tree(two.path());
  std::size_t profiles = 0;
  for (const auto& [name, content] : a) {
    if (name.starts_with("profiles/")) ++profiles;
    auto it = b.find(name);
    o.Expect(it != b.end() && it->second == content, "differs: " + name);
  }
  o.Expect(a.size() == b.size(), "file counts differ");
  o.Expect(profiles == 7, fmt::format("{} embedding profiles written", profiles));
  if (o.pass) o.detail = fmt::format("{} files identical, including {} embedding profiles", a.size(), profiles);
  return o;
}

Outcome RealData(const std::optional<fs::path>& dir) {
  Outcome o;
  if (!dir) {
    o.skipped = true;
    o.detail = "pass --real-data DIR to run against locally obtained corpora";
    return o;
  }
  auto load = [&](const std::string& name) {
    std::ifstream in(*dir / (name + ".conll"), std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + (*dir / (name + ".conll")).string());
    return BuildProfile(ParseConll(in, {}, {name, name}), {});
  };
  const DomainProfile train = load("conll_train");
  std::map<std::string, double> d;
  for (const char* t : {"conll_dev", "conll_test", "wiki", "wnut_train", "wnut_dev", "wnut_test"}) {
    d[t] = LexicalDifference(train, load(t));
  }
  o.Expect(d["conll_dev"] < d["conll_test"], "dev < test");
  o.Expect(d["conll_test"] < d["wiki"], "test < wiki");
  for (const char* t : {"wnut_train", "wnut_dev", "wnut_test"}) {
    o.Expect(d["wiki"] < d[t], std::string("wiki < ") + t);
  }
  o.detail += (o.detail.empty() ? "" : ", ") +
              fmt::format("dev {:.3f} test {:.3f} wiki {:.3f} wnut {:.3f}/{:.3f}/{:.3f}",
                          d["conll_dev"], d["conll_test"], d["wiki"], d["wnut_train"],
                          d["wnut_dev"], d["wnut_test"]);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 for no limit
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace transportkit

int main(int argc, char** argv) {
  using namespace transportkit;
  std::optional<fs::path> real_data;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--real-data" && i + 1 < argc) {
      real_data = argv[++i];
    } else {
      std::cerr << "usage: acceptance_test [--real-data DIR]\n";
      return 1;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "NER transportability table from score fixture", 1.0, TableSeven},
      {2, "NLI transportability table from score fixture", 1.0, TableEight},
      {3, "figure fits in-sample MAE <= 6.0", 5.0, Plausibility},
      {4, "fitter SSE within 1% of lattice oracle", 30.0, OptimizerOracle},
      {5, "exact-model recovery", 0.0, ExactRecovery},
      {6, "divergence property suite", 0.0, DivergenceSuite},
      {7, "constant system is entirely transportable", 0.0, TrivialSystem},
      {8, "full pipeline runs are byte identical", 0.0, Determinism},
      {9, "real-data lexical ordering", 0.0, [&] { return RealData(real_data); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.skipped && c.limit_seconds > 0.0 && seconds >= c.limit_seconds) {
      o.Expect(false, fmt::format("took {:.2f} s, limit {:.0f} s", seconds, c.limit_seconds));
    }
    const char* status = o.skipped ? "SKIP" : o.pass ? "PASS" : "FAIL";
    if (!o.skipped && !o.pass) ++failures;
    std::cout << fmt::format("{} [{}] {} ({:.3f} s): {}\n", status, c.id, c.name, seconds,
                             o.detail);
  }
  std::cout << (failures == 0 ? "all criteria passed\n"
                              : fmt::format("{} criteria failed\n", failures));
  return failures == 0 ? 0 : 1;
}
