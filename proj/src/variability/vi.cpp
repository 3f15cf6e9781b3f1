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

#include "varbench/variability.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "varbench/stats.hpp"

namespace varbench {

namespace {

void require(std::span<const double> x, std::size_t min_len, const char* what) {
  if (x.size() < min_len) {
    throw Error(ErrorCode::kTooShort, std::string(what) + " needs at least " +
                                          std::to_string(min_len) + " points, got " +
                                          std::to_string(x.size()));
  }
}

double nonzero_mean(std::span<const double> x) {
  const double m = stats::mean(x);
  if (m == 0.0) throw Error(ErrorCode::kZeroMean, "series mean is zero");
  return m;
}

}  // namespace

void VIWeights::validate() const {
  for (double w : {w_b, w_d, w_s}) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "VI weight outside [0,1]");
  }
  if (std::abs(w_b + w_d + w_s - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "VI weights must sum to 1");
  }
}

std::vector<double> variation_vector(std::span<const double> x) {
  require(x, 2, "variation vector");
  const double m = nonzero_mean(x);
  std::vector<double> v;
  v.reserve(x.size());
  for (double xi : x) v.push_back((xi - m) / m * 100.0);
  return v;
}

std::vector<double> change_vector(std::span<const double> v, Direction direction, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 0");
  const double cut = t * 100.0;
  std::vector<double> c;
  c.reserve(v.size());
  for (double vi : v) {
    const bool keep = direction == Direction::kHIB ? vi < -cut : vi > cut;
    c.push_back(keep ? vi : 0.0);
  }
  return c;
}

double breadth(std::span<const double> c) {
  if (c.empty()) throw Error(ErrorCode::kTooShort, "breadth of empty change vector");
  double sum = 0.0;
  for (double ci : c) sum += ci;
  return std::abs(sum / static_cast<double>(c.size()));
}

double dispersion(std::span<const double> x) {
  require(x, 2, "dispersion");
  const double m = nonzero_mean(x);
  return stats::pop_stddev(x) / std::abs(m) * 100.0;
}

double speed(std::span<const double> x) {
  require(x, 3, "speed");
  const double m = nonzero_mean(x);
  const auto g = stats::gradient(x);
  return stats::pop_stddev(g) / std::abs(m) * 100.0;
}

double combine(double b, double d, double s, const VIWeights& w) {
  return w.w_b * b + w.w_d * d + w.w_s * s;
}

VIResult vi(std::span<const double> x, Direction direction, double t, const VIWeights& w) {
  w.validate();
  require(x, 3, "VI");
  VIResult r;
  const auto c = change_vector(variation_vector(x), direction, t);
  r.breadth = breadth(c);
  r.dispersion = dispersion(x);
  r.speed = speed(x);
  r.vi = combine(r.breadth, r.dispersion, r.speed, w);
  r.n_points = x.size();
  r.threshold = t;
  r.weights = w;
  return r;
}

VIReport aggregate_vi(const Dataset& dataset, double t, const VIWeights& w,
                      const Catalog& catalog) {
  w.validate();
  VIReport report;
  using GroupKey = std::tuple<std::string, VmClass, std::string>;
  std::map<GroupKey, VIGroup> groups;

  for (const auto& vm : dataset.vms()) {
    auto& g = groups[{vm.provider, vm.vm_class, vm.vm_type}];
    g.provider = vm.provider;
    g.vm_class = vm.vm_class;
    g.vm_type = vm.vm_type;
    for (const auto& [metric, series] : series_of_vm(dataset, vm)) {
      const auto* spec = catalog.find(metric);
      if (spec == nullptr) continue;
      try {
        const auto values = series.values();
        auto r = vi(values, spec->direction, t, w);
        g.breadth += r.breadth;
        g.dispersion += r.dispersion;
        g.speed += r.speed;
        g.vi += r.vi;
        ++g.n_series;
        report.rows.push_back({vm, metric, r});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroMean && e.code() != ErrorCode::kTooShort) throw;
        ++g.n_skipped;
        report.skipped.push_back({vm, metric, e.code()});
      }
    }
  }

  for (auto& [key, g] : groups) {
    if (g.n_series == 0) {
      throw Error(ErrorCode::kEmptyGroup,
                  g.provider + "/" + std::string(to_string(g.vm_class)) + " has no computable series");
    }
    const auto n = static_cast<double>(g.n_series);
    g.breadth /= n;
    g.dispersion /= n;
    g.speed /= n;
    g.vi /= n;
    report.groups.push_back(g);
  }
  return report;
}

}  // namespace varbench
