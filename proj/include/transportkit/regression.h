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

#ifndef TRANSPORTKIT_REGRESSION_H_
#define TRANSPORTKIT_REGRESSION_H_

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace transportkit {

// A (similarity, score) observation.
struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

// y = a * exp(-b * x) + c
struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

struct FitOptions {
  // Log-spaced b candidates over [b_min, b_max]; b = 0 is always added.
  int grid_points = 1000;
  double b_min = 1e-3;
  double b_max = 1e2;
  int max_polish_steps = 50;
  std::string predictor;
  // Clamp predictions to [0, 100].
  bool percentage = false;
};

struct FitLog {
  CurveParams grid_optimum;
  double grid_sse = 0.0;
  int polish_steps = 0;
  int rejected_steps = 0;
  // Polishing produced non-finite values; the grid optimum was returned.
  bool polish_diverged = false;
};

struct FitModel {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  std::string predictor;
  double sse = 0.0;
  double mae = 0.0;
  std::size_t n_points = 0;
  bool percentage = false;
  FitLog fit_log;

  CurveParams params() const { return {a, b, c}; }
};

// Least-squares fit of the exponential decay family. Deterministic and
// independent of point order.
FitModel Fit(std::span<const CurvePoint> points, const FitOptions& options = {});

// a * exp(-b x) + c, clamped to [0, 100] for percentage models.
double Predict(const FitModel& model, double x);

// Sensitivity of the predicted score to the similarity measure,
// -a b exp(-b x).
double Derivative(const FitModel& model, double x);

double MeanAbsoluteError(const FitModel& model,
                         std::span<const CurvePoint> points);

double SumSquaredError(const CurveParams& params,
                       std::span<const CurvePoint> points);

// Rows d r_i / d(a, b, c) of the residuals r_i = y_i - f(x_i).
std::vector<std::array<double, 3>> ResidualJacobian(
    const CurveParams& params, std::span<const CurvePoint> points);

// Best (a, c) for a fixed b by linear least squares; a = 0 when the basis
// exp(-b x) is constant over the data.
CurveParams SolveLinearPart(double b, std::span<const CurvePoint> points);

nlohmann::ordered_json FitModelToJson(const FitModel& model);
FitModel FitModelFromJson(const nlohmann::json& j);

// Columns x,predicted over `samples` evenly spaced x in [0, x_max], followed
// by any extra columns repeated on every row.
void WriteCurveCsv(std::ostream& out, const FitModel& model, double x_max,
                   int samples = 101,
                   const std::vector<std::string>& extra_header = {},
                   const std::vector<std::string>& extra_values = {});

}  // namespace transportkit

#endif  // TRANSPORTKIT_REGRESSION_H_
