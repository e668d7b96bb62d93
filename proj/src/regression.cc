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

#include "transportkit/regression.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "transportkit/csv.h"
#include "transportkit/error.h"

namespace transportkit {

namespace {

constexpr double kSseTieTolerance = 1e-12;
constexpr int kMaxStepHalvings = 12;

double RawPredict(const CurveParams& p, double x) {
  return p.a * std::exp(-p.b * x) + p.c;
}

bool Finite(const CurveParams& p) {
  return std::isfinite(p.a) && std::isfinite(p.b) && std::isfinite(p.c);
}

std::vector<CurvePoint> Canonical(std::span<const CurvePoint> points) {
  std::vector<CurvePoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CurvePoint& l, const CurvePoint& r) {
              return l.x != r.x ? l.x < r.x : l.y < r.y;
            });
  return sorted;
}

std::vector<double> BGrid(const FitOptions& options) {
  std::vector<double> grid = {0.0};
  const int n = options.grid_points;
  if (n == 1) {
    grid.push_back(options.b_min);
    return grid;
  }
  const double lo = std::log(options.b_min);
  const double step = (std::log(options.b_max) - lo) / (n - 1);
  for (int k = 0; k < n; ++k) grid.push_back(std::exp(lo + step * k));
  return grid;
}

struct Candidate {
  CurveParams params;
  double sse = 0.0;
};

// Gauss-Newton on (a, b, c) with b kept >= 0. A step that raises the SSE is
// rejected and retried at half length.
Candidate Polish(Candidate start, std::span<const CurvePoint> points,
                 int max_steps, FitLog& log) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Candidate best = start;
  for (int step = 0; step < max_steps; ++step) {
    Eigen::MatrixXd jac(n, 3);
    Eigen::VectorXd residual(n);
    const auto rows = ResidualJacobian(best.params, points);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pt = points[static_cast<std::size_t>(i)];
      residual(i) = pt.y - RawPredict(best.params, pt.x);
      for (int k = 0; k < 3; ++k) jac(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    const Eigen::Vector3d delta =
        jac.completeOrthogonalDecomposition().solve(-residual);
    if (!delta.allFinite()) {
      log.polish_diverged = true;
      break;
    }

    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving <= kMaxStepHalvings; ++halving) {
      CurveParams trial{best.params.a + scale * delta(0),
                        std::max(0.0, best.params.b + scale * delta(1)),
                        best.params.c + scale * delta(2)};
      const double sse = SumSquaredError(trial, points);
      if (Finite(trial) && std::isfinite(sse) && sse < best.sse) {
        best = Candidate{trial, sse};
        accepted = true;
        break;
      }
      ++log.rejected_steps;
      scale *= 0.5;
    }
    ++log.polish_steps;
    if (!accepted) break;
    const double size = std::abs(scale * delta(0)) +
                        std::abs(scale * delta(1)) +
                        std::abs(scale * delta(2));
    const double mag = std::abs(best.params.a) + std::abs(best.params.b) +
                       std::abs(best.params.c);
    if (size <= 1e-15 * (1.0 + mag)) break;
  }
  return best;
}

}  // namespace

double SumSquaredError(const CurveParams& params,
                       std::span<const CurvePoint> points) {
  double sse = 0.0;
  for (const auto& pt : points) {
    const double r = pt.y - RawPredict(params, pt.x);
    sse += r * r;
  }
  return sse;
}

std::vector<std::array<double, 3>> ResidualJacobian(
    const CurveParams& params, std::span<const CurvePoint> points) {
  std::vector<std::array<double, 3>> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) {
    const double e = std::exp(-params.b * pt.x);
    rows.push_back({-e, params.a * pt.x * e, -1.0});
  }
  return rows;
}

CurveParams SolveLinearPart(double b, std::span<const CurvePoint> points) {
  const double n = static_cast<double>(points.size());
  double u_mean = 0.0;
  double y_mean = 0.0;
  for (const auto& pt : points) {
    u_mean += std::exp(-b * pt.x);
    y_mean += pt.y;
  }
  u_mean /= n;
  y_mean /= n;
  double suu = 0.0;
  double suy = 0.0;
  for (const auto& pt : points) {
    const double du = std::exp(-b * pt.x) - u_mean;
    suu += du * du;
    suy += du * (pt.y - y_mean);
  }
  // Relative to the squared basis scale (at most 1).
  if (suu <= 1e-28 * n) return CurveParams{0.0, b, y_mean};
  const double a = suy / suu;
  return CurveParams{a, b, y_mean - a * u_mean};
}

FitModel Fit(std::span<const CurvePoint> input, const FitOptions& options) {
  if (input.size() < 3) {
    throw UsageError("underdetermined: a 3-parameter fit needs at least 3 "
                     "points, got " + std::to_string(input.size()));
  }
  if (options.grid_points < 1 || !(options.b_min > 0.0) ||
      !(options.b_max > options.b_min)) {
    throw UsageError("invalid fit grid");
  }
  for (const auto& pt : input) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
      throw DataError("non-finite fit point");
    }
  }
  const std::vector<CurvePoint> points = Canonical(input);
  if (points.front().x == points.back().x) {
    throw UsageError("no predictor variation: all x values are identical");
  }

  Candidate best{{}, 0.0};
  bool have_best = false;
  for (double b : BGrid(options)) {
    const CurveParams p = SolveLinearPart(b, points);
    const double sse = SumSquaredError(p, points);
    if (!std::isfinite(sse)) continue;
    if (!have_best || sse < best.sse - kSseTieTolerance) {
      best = Candidate{p, sse};
      have_best = true;
    }
  }
  if (!have_best) throw NumericalError("no finite fit on the b grid");

  FitModel model;
  model.predictor = options.predictor;
  model.percentage = options.percentage;
  model.n_points = points.size();
  model.fit_log.grid_optimum = best.params;
  model.fit_log.grid_sse = best.sse;

  Candidate polished = Polish(best, points, options.max_polish_steps,
                              model.fit_log);
  if (model.fit_log.polish_diverged) polished = best;
  // Re-solving the linear part at the final b never raises the SSE.
  const CurveParams projected = SolveLinearPart(polished.params.b, points);
  const double projected_sse = SumSquaredError(projected, points);
  if (projected_sse < polished.sse) polished = Candidate{projected, projected_sse};

  model.a = polished.params.a;
  model.b = polished.params.b;
  model.c = polished.params.c;
  model.sse = polished.sse;
  model.mae = MeanAbsoluteError(model, points);
  return model;
}

double Predict(const FitModel& model, double x) {
  if (!std::isfinite(x)) throw UsageError("prediction input must be finite");
  double y = RawPredict(model.params(), x);
  if (model.percentage) y = std::clamp(y, 0.0, 100.0);
  return y;
}

double Derivative(const FitModel& model, double x) {
  if (!std::isfinite(x)) throw UsageError("derivative input must be finite");
  return -model.a * model.b * std::exp(-model.b * x);
}

double MeanAbsoluteError(const FitModel& model,
                         std::span<const CurvePoint> points) {
  if (points.empty()) throw UsageError("mean absolute error of no points");
  double total = 0.0;
  for (const auto& pt : points) total += std::abs(pt.y - Predict(model, pt.x));
  return total / static_cast<double>(points.size());
}

nlohmann::ordered_json FitModelToJson(const FitModel& model) {
  nlohmann::ordered_json j;
  j["a"] = model.a;
  j["b"] = model.b;
  j["c"] = model.c;
  j["predictor"] = model.predictor;
  j["sse"] = model.sse;
  j["mae"] = model.mae;
  j["n"] = model.n_points;
  j["percentage"] = model.percentage;
  const FitLog& log = model.fit_log;
  nlohmann::ordered_json fit_log;
  fit_log["grid_a"] = log.grid_optimum.a;
  fit_log["grid_b"] = log.grid_optimum.b;
  fit_log["grid_c"] = log.grid_optimum.c;
  fit_log["grid_sse"] = log.grid_sse;
  fit_log["polish_steps"] = log.polish_steps;
  fit_log["rejected_steps"] = log.rejected_steps;
  fit_log["polish_diverged"] = log.polish_diverged;
  j["fit_log"] = std::move(fit_log);
  return j;
}

FitModel FitModelFromJson(const nlohmann::json& j) {
  try {
    FitModel m;
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    m.c = j.at("c").get<double>();
    m.predictor = j.value("predictor", "");
    m.sse = j.value("sse", 0.0);
    m.mae = j.value("mae", 0.0);
    m.n_points = j.value("n", std::size_t{0});
    m.percentage = j.value("percentage", false);
    if (!Finite(m.params())) throw DataError("non-finite model parameters");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed fit model JSON: ") + e.what());
  }
}

void WriteCurveCsv(std::ostream& out, const FitModel& model, double x_max,
                   int samples, const std::vector<std::string>& extra_header,
                   const std::vector<std::string>& extra_values) {
  if (extra_header.size() != extra_values.size()) {
    throw UsageError("curve CSV: extra header and values differ in length");
  }
  csv::Row header = {"x", "predicted"};
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  csv::WriteRow(out, header);
  for (int i = 0; i < samples; ++i) {
    const double x =
        samples == 1 ? 0.0 : x_max * static_cast<double>(i) / (samples - 1);
    csv::Row row = {csv::FormatDouble(x), csv::FormatDouble(Predict(model, x))};
    row.insert(row.end(), extra_values.begin(), extra_values.end());
    csv::WriteRow(out, row);
  }
}

}  // namespace transportkit
