// Copyright 2026 The varbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varbench/model.hpp"

namespace varbench {

struct TransformRecord {
  double min = 0.0;
  double max = 1.0;
  double fill = 0.0;                  // training-window mean used for gaps
  std::vector<std::size_t> imputed;   // indices that were missing (NaN)
  int d = 1;
  std::vector<double> heads;          // first value of each differencing level
  std::vector<double> anchors;        // last value of each differencing level

  double normalize(double x) const { return (x - min) / (max - min); }
  double denormalize(double z) const { return min + z * (max - min); }
};

struct Preprocessed {
  std::vector<double> z;
  TransformRecord record;
};

/// Mean-impute NaN gaps, min-max to [0,1] on this window, difference d times.
/// Throws Error(kTooShort) below 30 points, Error(kDegenerateRange) when
/// max == min, Error(kInvalidArgument) unless d in {0,1,2}.
Preprocessed preprocess(std::span<const double> window, int d = 1);

/// Rebuilds the original-scale window from the differenced values.
std::vector<double> invert_preprocess(std::span<const double> z, const TransformRecord& record);

/// Turns h differenced-scale forecasts following the window into
/// original-scale values.
std::vector<double> invert_forecast(std::span<const double> z_future,
                                    const TransformRecord& record);

struct AdfResult {
  double statistic = 0.0;
  double critical = 0.0;  // 5% level
  int lags = 0;
  std::size_t n_obs = 0;
  bool stationary = false;
};

/// Dickey-Fuller regression with constant and `max_lag` lagged differences.
/// Stationary when the t-statistic is below the 5% critical value
/// (MacKinnon response surface). Throws Error(kTooShort) below 25 points.
AdfResult adf_check(std::span<const double> x, int max_lag = 1);

/// 5% critical value of the constant-only Dickey-Fuller test for n_obs.
double adf_critical_5pct(std::size_t n_obs);

struct ArimaOrder {
  int p = 1;
  int d = 1;
  int q = 1;

  friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

struct FitOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;
};

/// z_t = c + sum phi_i z_{t-i} + e_t + sum theta_j e_{t-j}, fitted on data that
/// is already differenced d times.
struct ArimaModel {
  ArimaOrder order;
  double intercept = 0.0;
  std::vector<double> phi;
  std::vector<double> theta;
  double sigma2 = 0.0;
  std::size_t n_train = 0;
  int iterations = 0;
  std::vector<double> history;    // last max(p,1) training values
  std::vector<double> residuals;  // last max(q,1) in-sample residuals
};

/// Conditional sum of squares (residuals before the sample set to 0) by
/// Levenberg-Marquardt, MA part kept invertible. Throws Error(kTooShort)
/// below 10*(p+q+1) points, Error(kNonConvergence) when the iteration budget
/// runs out, Error(kSingular) for a degenerate design.
ArimaModel fit_arima(std::span<const double> z, ArimaOrder order = {},
                     const FitOptions& options = {});

/// Conditional residuals of `model` on z.
std::vector<double> arima_residuals(const ArimaModel& model, std::span<const double> z);

/// Iterated h-step forecasts on the fitted (differenced) scale.
std::vector<double> forecast(const ArimaModel& model, std::size_t h = 5);

struct VarModel {
  int lag = 1;
  Eigen::VectorXd intercept;
  std::vector<Eigen::MatrixXd> coefficients;  // one k x k matrix per lag
  std::size_t n_train = 0;
  Eigen::MatrixXd history;                    // last `lag` rows of training data

  std::size_t k() const { return static_cast<std::size_t>(intercept.size()); }
};

/// Equation-by-equation OLS on lagged values; rows are time, columns series.
/// Throws Error(kTooShort) below 10*k*lag rows and Error(kSingular) on
/// collinear regressors.
VarModel fit_var(const Eigen::MatrixXd& z, int lag = 1);

/// Iterated h-step forecasts, h rows by k columns.
Eigen::MatrixXd forecast(const VarModel& model, std::size_t h = 5);

/// Repeats the last training value.
std::vector<double> naive_forecast(std::span<const double> train, std::size_t h = 5);

/// Mean absolute error. Throws Error(kLengthMismatch) on unequal or empty input.
double mae(std::span<const double> real, std::span<const double> pred);

/// In-sample one-step naive MAE of `train`.
double naive_mae(std::span<const double> train);

/// mae(real, pred) / naive_mae(train). Throws Error(kZeroDenominator) for a
/// constant training series, Error(kTooShort) below 2 training points.
double mase(std::span<const double> real, std::span<const double> pred,
            std::span<const double> train);

enum class ForecastModel { kNaive, kVar, kArima };
std::string_view to_string(ForecastModel m);

enum class MaeScale { kNormalized, kOriginal };

struct EvalConfig {
  std::size_t horizon = 5;
  ArimaOrder order;
  int var_lag = 1;
  std::size_t min_points = 100;
  MaeScale mae_scale = MaeScale::kNormalized;
  std::vector<ForecastModel> models = {ForecastModel::kNaive, ForecastModel::kVar,
                                       ForecastModel::kArima};
  FitOptions fit;
};

struct ForecastRow {
  VmKey vm;
  std::string metric;
  ForecastModel model = ForecastModel::kNaive;
  std::size_t horizon = 0;
  double mae = 0.0;
  double mase = 0.0;
  double naive_denominator = 0.0;  // in-sample naive MAE, original scale
  bool mae_below_005 = false;
  bool mae_below_002 = false;
};

struct ForecastSkip {
  VmKey vm;
  std::string metric;
  ForecastModel model = ForecastModel::kNaive;
  ErrorCode reason = ErrorCode::kTooShort;
};

struct ForecastAggregate {
  std::string provider;
  std::string vm;  // empty for provider-level rows
  ForecastModel model = ForecastModel::kNaive;
  double mean_mase = 0.0;
  double mean_mae = 0.0;
  std::size_t n = 0;
};

struct ForecastReport {
  MaeScale mae_scale = MaeScale::kNormalized;
  std::vector<ForecastRow> rows;
  std::vector<ForecastSkip> skipped;
  std::vector<ForecastAggregate> by_vm;
  std::vector<ForecastAggregate> by_provider;
};

/// Holds out the last `horizon` points of every (vm, metric) series, fits on
/// the rest and scores each model. VAR sees the whole per-VM panel.
ForecastReport evaluate_all(const Dataset& dataset, const EvalConfig& config = {},
                            const Catalog& catalog = catalog_default());

}  // namespace varbench
