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

#include "varbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "varbench/stats.hpp"
#include "varbench/variability.hpp"

namespace varbench {

RSDSummary rsd_summary(const Dataset& dataset, const std::string& provider, bool filtered,
                       const Catalog& catalog) {
  const auto vms = dataset.vms_of(provider);
  if (vms.empty()) throw Error(ErrorCode::kEmptySelection, "no VMs for provider " + provider);

  RSDSummary summary;
  summary.provider = provider;
  std::map<std::string, std::vector<double>> per_metric;
  for (const auto& vm : vms) {
    for (const auto& [metric, series] : series_of_vm(dataset, vm)) {
      if (catalog.find(metric) == nullptr) continue;
      try {
        auto values = series.values();
        if (filtered) values = percentile_filter(values);
        per_metric[metric].push_back(dispersion(values));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroMean && e.code() != ErrorCode::kTooShort) throw;
        ++summary.skipped;
      }
    }
  }
  for (const auto& spec : catalog.specs()) {
    const auto it = per_metric.find(spec.id);
    if (it == per_metric.end()) continue;
    const auto& r = it->second;
    RSDEntry e;
    e.metric = spec.id;
    e.avg = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    e.min = *std::min_element(r.begin(), r.end());
    e.max = *std::max_element(r.begin(), r.end());
    e.avg = std::clamp(e.avg, e.min, e.max);
    e.n_vms = r.size();
    summary.entries.push_back(e);
  }
  return summary;
}

std::vector<double> percentile_filter(std::span<const double> x, double lo, double hi) {
  if (x.size() < 20) {
    throw Error(ErrorCode::kTooShort,
                "percentile filter needs at least 20 points, got " + std::to_string(x.size()));
  }
  if (!(lo >= 0.0 && lo <= hi && hi <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "percentiles must satisfy 0 <= lo <= hi <= 100");
  }
  return filter_between(x, stats::quantile(x, lo / 100.0), stats::quantile(x, hi / 100.0));
}

std::vector<double> filter_between(std::span<const double> x, double lo_value, double hi_value) {
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) {
    if (v >= lo_value && v <= hi_value) out.push_back(v);
  }
  return out;
}

CorrelationMatrix correlation_matrix(const std::map<std::string, Series>& series,
                                     const Catalog& catalog) {
  std::vector<const Series*> cols;
  CorrelationMatrix m;
  for (const auto& spec : catalog.specs()) {
    const auto it = series.find(spec.id);
    if (it == series.end()) continue;
    cols.push_back(&it->second);
    m.metrics.push_back(spec.id);
  }
  const std::size_t k = cols.size();
  m.values.assign(k * k, 0.0);

  std::vector<std::map<std::int64_t, double>> by_round(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : cols[i]->points) by_round[i][p.round_index] = p.value;
  }

  for (std::size_t i = 0; i < k; ++i) {
    m.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<double> x, y;
      for (const auto& [round, v] : by_round[i]) {
        const auto it = by_round[j].find(round);
        if (it == by_round[j].end()) continue;
        x.push_back(v);
        y.push_back(it->second);
      }
      if (x.size() < 3) {
        throw Error(ErrorCode::kInsufficientOverlap, m.metrics[i] + " and " + m.metrics[j] +
                                                         " share " + std::to_string(x.size()) +
                                                         " rounds");
      }
      const double r = stats::pearson(x, y);
      m.at(i, j) = r;
      m.at(j, i) = r;
    }
  }
  return m;
}

CorrelationMatrix mean_correlation(std::span<const CorrelationMatrix> matrices,
                                   const Catalog& catalog) {
  std::set<std::string> present;
  for (const auto& mat : matrices) present.insert(mat.metrics.begin(), mat.metrics.end());
  CorrelationMatrix out;
  for (const auto& spec : catalog.specs()) {
    if (present.count(spec.id) != 0) out.metrics.push_back(spec.id);
  }
  const std::size_t k = out.size();
  out.values.assign(k * k, 0.0);
  std::vector<double> counts(k * k, 0.0);

  for (const auto& mat : matrices) {
    std::vector<std::size_t> idx;
    for (const auto& id : mat.metrics) {
      idx.push_back(static_cast<std::size_t>(
          std::find(out.metrics.begin(), out.metrics.end(), id) - out.metrics.begin()));
    }
    for (std::size_t i = 0; i < mat.size(); ++i) {
      for (std::size_t j = 0; j < mat.size(); ++j) {
        out.values[idx[i] * k + idx[j]] += mat.at(i, j);
        counts[idx[i] * k + idx[j]] += 1.0;
      }
    }
  }
  for (std::size_t i = 0; i < k * k; ++i) {
    out.values[i] = counts[i] > 0.0 ? out.values[i] / counts[i] : 0.0;
  }
  for (std::size_t i = 0; i < k; ++i) out.at(i, i) = 1.0;
  return out;
}

CorrelationMatrix provider_correlation(const Dataset& dataset, const std::string& provider,
                                       const Catalog& catalog) {
  const auto vms = dataset.vms_of(provider);
  if (vms.empty()) throw Error(ErrorCode::kEmptySelection, "no VMs for provider " + provider);
  std::vector<CorrelationMatrix> mats;
  for (const auto& vm : vms) mats.push_back(correlation_matrix(series_of_vm(dataset, vm), catalog));
  return mean_correlation(mats, catalog);
}

std::vector<std::size_t> top_gradient_points(std::span<const double> y, std::size_t n) {
  if (y.size() < 2) throw Error(ErrorCode::kTooShort, "gradient needs at least 2 points");
  std::vector<double> g(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) g[i] = std::abs(y[i + 1] - y[i]);
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto k = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return std::tie(g[b], a) < std::tie(g[a], b);
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

namespace {

std::vector<double> normalized(std::span<const double> x) {
  const double m = stats::mean(x);
  if (m == 0.0) throw Error(ErrorCode::kZeroMean, "series mean is zero");
  std::vector<double> y;
  y.reserve(x.size());
  for (double v : x) y.push_back(v / m);
  return y;
}

}  // namespace

CoincidenceVerdict gradient_coincidence(std::span<const double> a, std::span<const double> b,
                                        std::size_t n, double threshold) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "coincidence needs aligned series");
  }
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be positive");
  if (a.size() <= n) {
    throw Error(ErrorCode::kTooShort, "coincidence needs more than " + std::to_string(n) +
                                          " points, got " + std::to_string(a.size()));
  }
  const auto ta = top_gradient_points(normalized(a), n);
  const auto tb = top_gradient_points(normalized(b), n);
  std::vector<std::size_t> common;
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(common));

  CoincidenceVerdict v;
  v.n = n;
  v.overlap = common.size();
  v.threshold = threshold;
  v.related = static_cast<double>(v.overlap) > static_cast<double>(n) * threshold;
  return v;
}

CoincidenceVerdict gradient_coincidence(const Series& a, const Series& b, std::size_t n,
                                        double threshold) {
  std::map<std::int64_t, double> rb;
  for (const auto& p : b.points) rb[p.round_index] = p.value;
  std::vector<std::pair<std::int64_t, double>> ra;
  for (const auto& p : a.points) ra.emplace_back(p.round_index, p.value);
  std::sort(ra.begin(), ra.end());
  std::vector<double> xa, xb;
  for (const auto& [round, v] : ra) {
    const auto it = rb.find(round);
    if (it == rb.end()) continue;
    xa.push_back(v);
    xb.push_back(it->second);
  }
  auto verdict = gradient_coincidence(xa, xb, n, threshold);
  verdict.metric_a = a.metric;
  verdict.metric_b = b.metric;
  return verdict;
}

CprValue cpr(double mean_value, Direction direction, double cost_per_hour) {
  if (!(mean_value > 0.0)) {
    throw Error(ErrorCode::kNonPositivePerformance, "mean performance must be positive");
  }
  if (!(cost_per_hour >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "cost must be >= 0");
  CprValue v;
  v.ratio = direction == Direction::kHIB ? cost_per_hour / mean_value : cost_per_hour * mean_value;
  v.excluded = cost_per_hour == 0.0;
  return v;
}

std::vector<CprRow> cpr_table(const Dataset& dataset, std::span<const VmDescriptor> vms,
                              const Catalog& catalog) {
  using GroupKey = std::tuple<std::string, VmClass, std::string>;
  std::map<GroupKey, std::map<std::string, std::pair<double, std::size_t>>> sums;
  for (const auto& m : dataset.rows()) {
    if (catalog.find(m.metric) == nullptr) continue;
    auto& s = sums[{m.vm.provider, m.vm.vm_class, m.vm.vm_type}][m.metric];
    s.first += m.value;
    s.second += 1;
  }
  std::vector<CprRow> rows;
  for (const auto& [key, metrics] : sums) {
    const auto& [provider, cls, type] = key;
    const auto d = std::find_if(vms.begin(), vms.end(), [&](const VmDescriptor& v) {
      return v.key.provider == provider && v.key.vm_class == cls && v.key.vm_type == type;
    });
    if (d == vms.end()) continue;
    for (const auto& spec : catalog.specs()) {
      const auto it = metrics.find(spec.id);
      if (it == metrics.end()) continue;
      CprRow row;
      row.provider = provider;
      row.vm_class = cls;
      row.vm_type = type;
      row.metric = spec.id;
      row.mean = it->second.first / static_cast<double>(it->second.second);
      row.cost_per_hour = d->cost_per_hour;
      row.cpr = cpr(row.mean, spec.direction, d->cost_per_hour);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace varbench
