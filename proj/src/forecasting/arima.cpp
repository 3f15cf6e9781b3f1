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
#include <limits>

#include "varbench/forecasting.hpp"
#include "varbench/stats.hpp"

namespace varbench {

namespace {

struct Params {
  double c = 0.0;
  std::vector<double> phi;
  std::vector<double> theta;

  Eigen::VectorXd pack() const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(1 + phi.size() + theta.size()));
    Eigen::Index k = 0;
    b(k++) = c;
    for (double v : phi) b(k++) = v;
    for (double v : theta) b(k++) = v;
    return b;
  }

  static Params unpack(const Eigen::VectorXd& b, std::size_t p, std::size_t q) {
    Params out;
    Eigen::Index k = 0;
    out.c = b(k++);
    for (std::size_t i = 0; i < p; ++i) out.phi.push_back(b(k++));
    for (std::size_t j = 0; j < q; ++j) out.theta.push_back(b(k++));
    return out;
  }
};

// Residuals e (length n, zero before index p) and optionally de/dbeta.
double css(std::span<const double> z, const Params& m, std::vector<double>& e,
           Eigen::MatrixXd* jac) {
  const std::size_t n = z.size();
  const std::size_t p = m.phi.size();
  const std::size_t q = m.theta.size();
  const auto k = static_cast<Eigen::Index>(1 + p + q);
  e.assign(n, 0.0);
  if (jac != nullptr) jac->setZero(static_cast<Eigen::Index>(n), k);
  double s = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double pred = m.c;
    for (std::size_t i = 1; i <= p; ++i) pred += m.phi[i - 1] * z[t - i];
    for (std::size_t j = 1; j <= q && j <= t; ++j) pred += m.theta[j - 1] * e[t - j];
    e[t] = z[t] - pred;
    s += e[t] * e[t];
    if (jac == nullptr) continue;
    const auto ti = static_cast<Eigen::Index>(t);
    Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(k);
    d(0) = -1.0;
    for (std::size_t i = 1; i <= p; ++i) d(static_cast<Eigen::Index>(i)) = -z[t - i];
    for (std::size_t j = 1; j <= q && j <= t; ++j) {
      d(static_cast<Eigen::Index>(p + j)) -= e[t - j];
      d -= m.theta[j - 1] * jac->row(static_cast<Eigen::Index>(t - j));
    }
    jac->row(ti) = d;
  }
  return s;
}

bool invertible(const std::vector<double>& theta) {
  const auto q = static_cast<Eigen::Index>(theta.size());
  if (q == 0) return true;
  if (q == 1) return std::abs(theta[0]) < 1.0;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index j = 0; j < q; ++j) comp(0, j) = -theta[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < q; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  return (es.eigenvalues().array().abs() < 1.0).all();
}

Params initial_guess(std::span<const double> z, std::size_t p, std::size_t q) {
  Params m;
  m.theta.assign(q, 0.0);
  if (p == 0) {
    m.c = stats::mean(z);
    return m;
  }
  const std::size_t rows = z.size() - p;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(1 + p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    y(ri) = z[r + p];
    X(ri, 0) = 1.0;
    for (std::size_t i = 1; i <= p; ++i) X(ri, static_cast<Eigen::Index>(i)) = z[r + p - i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) throw Error(ErrorCode::kSingular, "AR design is rank deficient");
  const Eigen::VectorXd b = qr.solve(y);
  m.c = b(0);
  for (std::size_t i = 1; i <= p; ++i) m.phi.push_back(b(static_cast<Eigen::Index>(i)));
  return m;
}

}  // namespace

ArimaModel fit_arima(std::span<const double> z, ArimaOrder order, const FitOptions& options) {
  if (order.p < 0 || order.q < 0 || order.d < 0) {
    throw Error(ErrorCode::kInvalidArgument, "ARIMA orders must be >= 0");
  }
  const auto p = static_cast<std::size_t>(order.p);
  const auto q = static_cast<std::size_t>(order.q);
  const std::size_t need = 10 * (p + q + 1);
  if (z.size() < need) {
    throw Error(ErrorCode::kTooShort, "ARIMA needs at least " + std::to_string(need) +
                                          " points, got " + std::to_string(z.size()));
  }

  Params cur = initial_guess(z, p, q);
  std::vector<double> e;
  Eigen::MatrixXd jac;
  double s = css(z, cur, e, &jac);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;

  while (!converged) {
    if (it >= options.max_iterations) {
      throw Error(ErrorCode::kNonConvergence,
                  "CSS did not converge in " + std::to_string(options.max_iterations) + " iterations");
    }
    ++it;
    const Eigen::Map<const Eigen::VectorXd> ev(e.data(), static_cast<Eigen::Index>(e.size()));
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * ev;
    if (!a.allFinite() || !g.allFinite()) throw Error(ErrorCode::kSingular, "non-finite CSS gradient");
    if (g.lpNorm<Eigen::Infinity>() <= options.tolerance * (1.0 + s)) break;

    const Eigen::VectorXd beta = cur.pack();
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index i = 0; i < a.rows(); ++i) damped(i, i) += lambda * std::max(a(i, i), 1e-12);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::kSingular, "singular CSS normal matrix");
      const Eigen::VectorXd step = ldlt.solve(-g);
      const Params trial = Params::unpack(beta + step, p, q);
      std::vector<double> e_trial;
      double s_trial = std::numeric_limits<double>::infinity();
      if (step.allFinite() && invertible(trial.theta)) s_trial = css(z, trial, e_trial, nullptr);

      if (s_trial < s) {
        const bool small_gain = s - s_trial <= options.tolerance * (s + options.tolerance);
        const bool small_step =
            step.norm() <= options.tolerance * (beta.norm() + options.tolerance);
        cur = trial;
        s = css(z, cur, e, &jac);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = small_gain || small_step;
      } else {
        lambda *= 10.0;
        if (lambda > 1e12) {
          // No descent direction left: a (possibly boundary) minimum.
          accepted = true;
          converged = true;
        }
      }
    }
  }

  ArimaModel model;
  model.order = order;
  model.intercept = cur.c;
  model.phi = cur.phi;
  model.theta = cur.theta;
  model.n_train = z.size();
  model.sigma2 = s / static_cast<double>(z.size() - p);
  model.iterations = it;
  const std::size_t hp = std::max<std::size_t>(p, 1);
  const std::size_t hq = std::max<std::size_t>(q, 1);
  model.history.assign(z.end() - static_cast<std::ptrdiff_t>(hp), z.end());
  model.residuals.assign(e.end() - static_cast<std::ptrdiff_t>(hq), e.end());
  return model;
}

std::vector<double> arima_residuals(const ArimaModel& model, std::span<const double> z) {
  Params m{model.intercept, model.phi, model.theta};
  std::vector<double> e;
  css(z, m, e, nullptr);
  return e;
}

std::vector<double> forecast(const ArimaModel& model, std::size_t h) {
  std::vector<double> zs = model.history;
  std::vector<double> es = model.residuals;
  std::vector<double> out;
  out.reserve(h);
  for (std::size_t step = 0; step < h; ++step) {
    double pred = model.intercept;
    for (std::size_t i = 1; i <= model.phi.size(); ++i) pred += model.phi[i - 1] * zs[zs.size() - i];
    for (std::size_t j = 1; j <= model.theta.size(); ++j) {
      pred += model.theta[j - 1] * es[es.size() - j];
    }
    zs.push_back(pred);
    es.push_back(0.0);
    out.push_back(pred);
  }
  return out;
}

}  // namespace varbench
