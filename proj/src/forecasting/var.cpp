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

#include "varbench/forecasting.hpp"

namespace varbench {

VarModel fit_var(const Eigen::MatrixXd& z, int lag) {
  if (lag < 1) throw Error(ErrorCode::kInvalidArgument, "VAR lag must be >= 1");
  const auto k = z.cols();
  const auto t = z.rows();
  const auto l = static_cast<Eigen::Index>(lag);
  if (k == 0) throw Error(ErrorCode::kEmptySelection, "VAR needs at least one series");
  if (t < 10 * k * l || t <= l + 1) {
    throw Error(ErrorCode::kTooShort, "VAR needs at least " + std::to_string(10 * k * l) +
                                          " rows, got " + std::to_string(t));
  }
  const Eigen::Index rows = t - l;
  const Eigen::Index cols = 1 + k * l;
  Eigen::MatrixXd x(rows, cols);
  x.col(0).setOnes();
  for (Eigen::Index i = 1; i <= l; ++i) x.block(0, 1 + (i - 1) * k, rows, k) = z.middleRows(l - i, rows);
  const Eigen::MatrixXd y = z.bottomRows(rows);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < cols) throw Error(ErrorCode::kSingular, "VAR regressors are collinear");
  const Eigen::MatrixXd b = qr.solve(y);

  VarModel m;
  m.lag = lag;
  m.intercept = b.row(0).transpose();
  for (Eigen::Index i = 1; i <= l; ++i) {
    m.coefficients.push_back(b.middleRows(1 + (i - 1) * k, k).transpose());
  }
  m.n_train = static_cast<std::size_t>(t);
  m.history = z.bottomRows(l);
  return m;
}

Eigen::MatrixXd forecast(const VarModel& model, std::size_t h) {
  const auto k = static_cast<Eigen::Index>(model.k());
  const auto l = static_cast<Eigen::Index>(model.lag);
  Eigen::MatrixXd buf(l + static_cast<Eigen::Index>(h), k);
  buf.topRows(l) = model.history;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(h); ++s) {
    Eigen::VectorXd next = model.intercept;
    for (Eigen::Index i = 1; i <= l; ++i) {
      next += model.coefficients[static_cast<std::size_t>(i - 1)] * buf.row(l + s - i).transpose();
    }
    buf.row(l + s) = next.transpose();
  }
  return buf.bottomRows(static_cast<Eigen::Index>(h));
}

}  // namespace varbench
