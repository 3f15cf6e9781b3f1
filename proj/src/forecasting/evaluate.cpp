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
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "varbench/forecasting.hpp"

namespace varbench {

namespace {

struct Outcome {
  std::optional<ForecastRow> row;
  ErrorCode reason = ErrorCode::kTooShort;
};

struct Prepared {
  std::string metric;
  std::vector<double> train;
  std::vector<double> test;
  TransformRecord record;
  std::vector<double> z;
};

ForecastRow score(const VmKey& vm, const std::string& metric, ForecastModel model,
                  std::span<const double> test, std::span<const double> pred,
                  std::span<const double> train, const TransformRecord& rec,
                  const EvalConfig& config) {
  ForecastRow row;
  row.vm = vm;
  row.metric = metric;
  row.model = model;
  row.horizon = test.size();
  const double raw_mae = mae(test, pred);
  row.naive_denominator = naive_mae(train);
  row.mase = mase(test, pred, train);
  row.mae = config.mae_scale == MaeScale::kNormalized ? raw_mae / (rec.max - rec.min) : raw_mae;
  row.mae_below_005 = row.mae < 0.05;
  row.mae_below_002 = row.mae < 0.02;
  return row;
}

bool wants(const EvalConfig& config, ForecastModel m) {
  return std::find(config.models.begin(), config.models.end(), m) != config.models.end();
}

// VAR over the VM's aligned panel of `metrics`. Keyed by metric.
std::map<std::string, Outcome> evaluate_var(const VmKey& vm,
                                            const std::map<std::string, Series>& series,
                                            const std::vector<std::string>& metrics,
                                            const std::map<std::string, Prepared>& uni,
                                            const EvalConfig& config) {
  std::map<std::string, Outcome> out;
  std::set<std::int64_t> round_set;
  for (const auto& m : metrics) {
    for (const auto& p : series.at(m).points) round_set.insert(p.round_index);
  }
  const std::vector<std::int64_t> rounds(round_set.begin(), round_set.end());
  const std::size_t h = config.horizon;
  if (rounds.size() <= h) {
    for (const auto& m : metrics) out[m].reason = ErrorCode::kTooShort;
    return out;
  }
  const std::size_t n_train = rounds.size() - h;

  std::vector<Prepared> cols;
  std::vector<std::size_t> source;  // column of the fitted panel feeding each entry of cols
  std::vector<std::vector<double>> distinct;
  for (const auto& m : metrics) {
    std::map<std::int64_t, double> by_round;
    for (const auto& p : series.at(m).points) by_round[p.round_index] = p.value;
    Prepared prep;
    prep.metric = m;
    std::vector<double> column;
    for (auto r : rounds) {
      const auto it = by_round.find(r);
      column.push_back(it == by_round.end() ? std::numeric_limits<double>::quiet_NaN() : it->second);
    }
    prep.test.assign(column.begin() + static_cast<std::ptrdiff_t>(n_train), column.end());
    if (std::any_of(prep.test.begin(), prep.test.end(), [](double v) { return !std::isfinite(v); })) {
      out[m].reason = ErrorCode::kEmptySelection;
      continue;
    }
    try {
      auto pp = preprocess(std::span(column).first(n_train), config.order.d);
      prep.record = std::move(pp.record);
      prep.z = std::move(pp.z);
    } catch (const Error& e) {
      out[m].reason = e.code();
      continue;
    }
    prep.train = uni.at(m).train;
    const auto dup = std::find(distinct.begin(), distinct.end(), prep.z);
    if (dup == distinct.end()) {
      source.push_back(distinct.size());
      distinct.push_back(prep.z);
    } else {
      source.push_back(static_cast<std::size_t>(dup - distinct.begin()));
    }
    cols.push_back(std::move(prep));
  }
  if (cols.empty()) return out;

  const auto rows = static_cast<Eigen::Index>(distinct.front().size());
  Eigen::MatrixXd z(rows, static_cast<Eigen::Index>(distinct.size()));
  for (std::size_t c = 0; c < distinct.size(); ++c) {
    z.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXd>(distinct[c].data(), rows);
  }
  Eigen::MatrixXd fc;
  try {
    fc = forecast(fit_var(z, config.var_lag), h);
  } catch (const Error& e) {
    for (const auto& c : cols) out[c.metric].reason = e.code();
    return out;
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto& c = cols[i];
    std::vector<double> zf(h);
    for (std::size_t s = 0; s < h; ++s) {
      zf[s] = fc(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(source[i]));
    }
    const auto pred = invert_forecast(zf, c.record);
    try {
      out[c.metric].row = score(vm, c.metric, ForecastModel::kVar, c.test, pred, c.train,
                                uni.at(c.metric).record, config);
    } catch (const Error& e) {
      out[c.metric].reason = e.code();
    }
  }
  return out;
}

void aggregate(ForecastReport& report) {
  using VmAgg = std::tuple<std::string, std::string, int>;
  std::map<VmAgg, ForecastAggregate> vms;
  std::map<std::pair<std::string, int>, ForecastAggregate> providers;
  for (const auto& r : report.rows) {
    const int m = static_cast<int>(r.model);
    for (auto* a : {&vms[{r.vm.provider, r.vm.label(), m}], &providers[{r.vm.provider, m}]}) {
      a->provider = r.vm.provider;
      a->model = r.model;
      a->mean_mase += r.mase;
      a->mean_mae += r.mae;
      ++a->n;
    }
    vms[{r.vm.provider, r.vm.label(), m}].vm = r.vm.label();
  }
  for (auto& [k, a] : vms) {
    a.mean_mase /= static_cast<double>(a.n);
    a.mean_mae /= static_cast<double>(a.n);
    report.by_vm.push_back(a);
  }
  for (auto& [k, a] : providers) {
    a.mean_mase /= static_cast<double>(a.n);
    a.mean_mae /= static_cast<double>(a.n);
    report.by_provider.push_back(a);
  }
}

}  // namespace

ForecastReport evaluate_all(const Dataset& dataset, const EvalConfig& config,
                            const Catalog& catalog) {
  if (config.horizon == 0) throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
  ForecastReport report;
  report.mae_scale = config.mae_scale;
  const std::size_t h = config.horizon;

  for (const auto& vm : dataset.vms()) {
    const auto series = series_of_vm(dataset, vm);
    std::vector<std::string> metrics;
    std::map<std::string, Prepared> uni;
    std::map<std::string, ErrorCode> uni_fail;
    for (const auto& spec : catalog.specs()) {
      const auto it = series.find(spec.id);
      if (it == series.end()) continue;
      const auto values = it->second.values();
      if (values.size() < std::max(config.min_points, h + 2)) {
        uni_fail[spec.id] = ErrorCode::kTooShort;
        continue;
      }
      Prepared prep;
      prep.metric = spec.id;
      prep.train.assign(values.begin(), values.end() - static_cast<std::ptrdiff_t>(h));
      prep.test.assign(values.end() - static_cast<std::ptrdiff_t>(h), values.end());
      try {
        auto pp = preprocess(prep.train, config.order.d);
        prep.record = std::move(pp.record);
        prep.z = std::move(pp.z);
        if (naive_mae(prep.train) == 0.0) throw Error(ErrorCode::kZeroDenominator, spec.id);
      } catch (const Error& e) {
        uni_fail[spec.id] = e.code();
        continue;
      }
      metrics.push_back(spec.id);
      uni.emplace(spec.id, std::move(prep));
    }

    std::map<std::string, Outcome> var_out;
    if (wants(config, ForecastModel::kVar) && !metrics.empty()) {
      var_out = evaluate_var(vm, series, metrics, uni, config);
    }

    for (const auto& spec : catalog.specs()) {
      if (series.find(spec.id) == series.end()) continue;
      for (const auto model : config.models) {
        const auto fail = uni_fail.find(spec.id);
        if (fail != uni_fail.end()) {
          report.skipped.push_back({vm, spec.id, model, fail->second});
          continue;
        }
        const auto& prep = uni.at(spec.id);
        try {
          switch (model) {
            case ForecastModel::kNaive:
              report.rows.push_back(score(vm, spec.id, model, prep.test,
                                          naive_forecast(prep.train, h), prep.train, prep.record,
                                          config));
              break;
            case ForecastModel::kArima: {
              const auto fit = fit_arima(prep.z, config.order, config.fit);
              const auto pred = invert_forecast(forecast(fit, h), prep.record);
              report.rows.push_back(
                  score(vm, spec.id, model, prep.test, pred, prep.train, prep.record, config));
              break;
            }
            case ForecastModel::kVar: {
              const auto& o = var_out.at(spec.id);
              if (o.row) {
                report.rows.push_back(*o.row);
              } else {
                report.skipped.push_back({vm, spec.id, model, o.reason});
              }
              break;
            }
          }
        } catch (const Error& e) {
          report.skipped.push_back({vm, spec.id, model, e.code()});
        }
      }
    }
  }
  aggregate(report);
  return report;
}

}  // namespace varbench
