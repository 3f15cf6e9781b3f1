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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "varbench/forecasting.hpp"
#include "varbench/stats.hpp"

namespace varbench {

namespace {

std::vector<double> diff(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(x.size() > 0 ? x.size() - 1 : 0);
  for (std::size_t i = 1; i < x.size(); ++i) out.push_back(x[i] - x[i - 1]);
  return out;
}

}  // namespace

Preprocessed preprocess(std::span<const double> window, int d) {
  if (d < 0 || d > 2) throw Error(ErrorCode::kInvalidArgument, "differencing order must be 0, 1 or 2");
  if (window.size() < 30) {
    throw Error(ErrorCode::kTooShort,
                "preprocessing needs at least 30 points, got " + std::to_string(window.size()));
  }
  Preprocessed out;
  auto& rec = out.record;
  rec.d = d;

  std::vector<double> present;
  for (double v : window) {
    if (std::isfinite(v)) present.push_back(v);
  }
  if (present.empty()) throw Error(ErrorCode::kTooShort, "window has no observed values");
  rec.fill = stats::mean(present);

  std::vector<double> x(window.begin(), window.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      x[i] = rec.fill;
      rec.imputed.push_back(i);
    }
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  rec.min = *lo;
  rec.max = *hi;
  if (!(rec.max > rec.min)) throw Error(ErrorCode::kDegenerateRange, "window is constant");

  std::vector<double> level;
  level.reserve(x.size());
  for (double v : x) level.push_back(rec.normalize(v));
  for (int i = 0; i < d; ++i) {
    rec.heads.push_back(level.front());
    rec.anchors.push_back(level.back());
    level = diff(level);
  }
  out.z = std::move(level);
  return out;
}

std::vector<double> invert_preprocess(std::span<const double> z, const TransformRecord& record) {
  std::vector<double> cur(z.begin(), z.end());
  for (int lev = record.d - 1; lev >= 0; --lev) {
    std::vector<double> up;
    up.reserve(cur.size() + 1);
    up.push_back(record.heads[static_cast<std::size_t>(lev)]);
    for (double v : cur) up.push_back(up.back() + v);
    cur = std::move(up);
  }
  for (double& v : cur) v = record.denormalize(v);
  return cur;
}

std::vector<double> invert_forecast(std::span<const double> z_future,
                                    const TransformRecord& record) {
  std::vector<double> cur(z_future.begin(), z_future.end());
  for (int lev = record.d - 1; lev >= 0; --lev) {
    double acc = record.anchors[static_cast<std::size_t>(lev)];
    for (double& v : cur) {
      acc += v;
      v = acc;
    }
  }
  for (double& v : cur) v = record.denormalize(v);
  return cur;
}

double adf_critical_5pct(std::size_t n_obs) {
  const double t = static_cast<double>(n_obs);
  return -2.86154 - 2.8903 / t - 4.234 / (t * t) - 40.040 / (t * t * t);
}

AdfResult adf_check(std::span<const double> x, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::kInvalidArgument, "lag must be >= 0");
  if (x.size() < 25) {
    throw Error(ErrorCode::kTooShort, "ADF needs at least 25 points, got " + std::to_string(x.size()));
  }
  const auto p = static_cast<std::size_t>(max_lag);
  const auto dy = diff(x);  // dy[i] = x[i+1] - x[i]
  if (dy.size() <= p + 3) throw Error(ErrorCode::kTooShort, "ADF lag too large for series");
  const std::size_t rows = dy.size() - p;
  const std::size_t cols = 2 + p;

  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = r + p;  // target dy[i], level x[i]
    const auto ri = static_cast<Eigen::Index>(r);
    y(ri) = dy[i];
    X(ri, 0) = 1.0;
    X(ri, 1) = x[i];
    for (std::size_t l = 1; l <= p; ++l) X(ri, static_cast<Eigen::Index>(1 + l)) = dy[i - l];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < static_cast<Eigen::Index>(cols)) {
    throw Error(ErrorCode::kSingular, "ADF regression is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  const double s2 = resid.squaredNorm() / static_cast<double>(rows - cols);
  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  const double se = std::sqrt(s2 * xtx_inv(1, 1));

  AdfResult r;
  r.statistic = beta(1) / se;
  r.lags = max_lag;
  r.n_obs = rows;
  r.critical = adf_critical_5pct(rows);
  r.stationary = r.statistic < r.critical;
  return r;
}

std::vector<double> naive_forecast(std::span<const double> train, std::size_t h) {
  if (train.empty()) throw Error(ErrorCode::kTooShort, "naive forecast needs training data");
  return std::vector<double>(h, train.back());
}

double mae(std::span<const double> real, std::span<const double> pred) {
  if (real.size() != pred.size() || real.empty()) {
    throw Error(ErrorCode::kLengthMismatch, "mae needs equal, non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) s += std::abs(real[i] - pred[i]);
  return s / static_cast<double>(real.size());
}

double naive_mae(std::span<const double> train) {
  if (train.size() < 2) throw Error(ErrorCode::kTooShort, "naive MAE needs at least 2 points");
  return mae(train.subspan(1), train.first(train.size() - 1));
}

double mase(std::span<const double> real, std::span<const double> pred,
            std::span<const double> train) {
  const double denom = naive_mae(train);
  if (denom == 0.0) throw Error(ErrorCode::kZeroDenominator, "training series is constant");
  return mae(real, pred) / denom;
}

std::string_view to_string(ForecastModel m) {
  switch (m) {
    case ForecastModel::kNaive: return "naive";
    case ForecastModel::kVar: return "VAR";
    case ForecastModel::kArima: return "ARIMA";
  }
  return "?";
}

}  // namespace varbench
