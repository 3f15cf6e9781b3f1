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

// Reference implementations and fixture builders shared by the tests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "varbench/error.hpp"
#include "varbench/model.hpp"

namespace vbtest {

inline varbench::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const varbench::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no varbench::Error thrown";
  return varbench::ErrorCode::kConfigError;
}

inline double oracle_mean(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

inline double oracle_pop_sd(const std::vector<double>& x) {
  const double m = oracle_mean(x);
  long double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(static_cast<double>(s / static_cast<long double>(x.size())));
}

struct OracleVI {
  double breadth, dispersion, speed, vi;
};

// Direct transcription of the indicator definitions with equal weights unless
// given.
inline OracleVI oracle_vi(const std::vector<double>& x, bool hib, double t, double wb = 1.0 / 3,
                          double wd = 1.0 / 3, double ws = 1.0 / 3) {
  const double mu = oracle_mean(x);
  const std::size_t n = x.size();
  double csum = 0;
  for (double xi : x) {
    const double v = (xi - mu) / mu * 100.0;
    if (hib && v < -t * 100.0) csum += v;
    if (!hib && v > t * 100.0) csum += v;
  }
  std::vector<double> g(n);
  g[0] = x[1] - x[0];
  g[n - 1] = x[n - 1] - x[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = 0.5 * (x[i + 1] - x[i - 1]);
  OracleVI r{};
  r.breadth = std::abs(csum / static_cast<double>(n));
  r.dispersion = oracle_pop_sd(x) / mu * 100.0;
  r.speed = oracle_pop_sd(g) / mu * 100.0;
  r.vi = wb * r.breadth + wd * r.dispersion + ws * r.speed;
  return r;
}

// Sort-and-slice percentile: rank h = (n-1)p, interpolate between floor/ceil.
inline double oracle_percentile(std::vector<double> x, double pct) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * pct / 100.0;
  const auto lo = static_cast<std::size_t>(h);
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

// Closed-form least-squares AR(1) slope with intercept.
inline double oracle_ar1_slope(const std::vector<double>& z) {
  const std::size_t n = z.size() - 1;
  double mx = 0, my = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    mx += z[t - 1];
    my += z[t];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    sxy += (z[t - 1] - mx) * (z[t] - my);
    sxx += (z[t - 1] - mx) * (z[t - 1] - mx);
  }
  return sxy / sxx;
}

inline double oracle_naive_mae(const std::vector<double>& train) {
  double s = 0;
  for (std::size_t t = 1; t < train.size(); ++t) s += std::abs(train[t] - train[t - 1]);
  return s / static_cast<double>(train.size() - 1);
}

// ---- generators ----------------------------------------------------------

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = nd(eng);
  return x;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed, double c = 0.0,
                               double sd = 1.0) {
  const auto e = white_noise(n + 200, seed, sd);
  std::vector<double> z(n + 200);
  z[0] = c / (1.0 - phi);
  for (std::size_t t = 1; t < z.size(); ++t) z[t] = c + phi * z[t - 1] + e[t];
  return std::vector<double>(z.begin() + 200, z.end());
}

inline std::vector<double> ma1(std::size_t n, double theta, std::uint64_t seed) {
  const auto e = white_noise(n + 1, seed);
  std::vector<double> z(n);
  for (std::size_t t = 0; t < n; ++t) z[t] = e[t + 1] + theta * e[t];
  return z;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
  const auto e = white_noise(n, seed);
  std::vector<double> z(n);
  double acc = 0;
  for (std::size_t t = 0; t < n; ++t) z[t] = acc += e[t];
  return z;
}

inline std::vector<double> positive_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> base(1.0, 1000.0);
  std::uniform_real_distribution<double> rel(-0.4, 0.4);
  const double b = base(eng);
  std::vector<double> x(n);
  for (auto& v : x) v = b * (1.0 + rel(eng));
  return x;
}

// ---- dataset builders ----------------------------------------------------

inline varbench::Timestamp hour(std::int64_t h,
                                const char* origin = "2020-04-01T00:00:00Z") {
  return varbench::parse_timestamp(origin) + std::chrono::hours(h);
}

inline varbench::VmKey vm(const std::string& provider, const std::string& type, int instance = 1,
                          varbench::VmClass cls = varbench::VmClass::kC1) {
  return varbench::VmKey{provider, cls, type, instance};
}

// One measurement per (metric, round); round r at origin + r hours.
inline void add_series(varbench::Dataset& ds, const varbench::VmKey& key, const std::string& metric,
                       const std::vector<double>& values, std::int64_t first_round = 0) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto r = first_round + static_cast<std::int64_t>(i);
    ds.add({metric, key, r, 0, hour(r), values[i]});
  }
}

// Every catalog metric for `n_vms` instances over `rounds` hourly rounds, with
// relative Gaussian noise. The first three metrics peak at midnight and the
// next three at 06:00 with relative amplitude `amplitude`.
inline varbench::Dataset planted_dataset(const std::string& provider, int n_vms,
                                         std::int64_t rounds, double amplitude, double noise,
                                         std::uint64_t seed) {
  varbench::Dataset ds;
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, noise);
  const auto& specs = varbench::catalog_default().specs();
  const double two_pi = 6.283185307179586;
  for (int v = 1; v <= n_vms; ++v) {
    const auto key = vm(provider, "T1", v);
    for (std::int64_t r = 0; r < rounds; ++r) {
      const double phase = two_pi * static_cast<double>(r % 24) / 24.0;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        double signal = 0.0;
        if (i < 3) signal = amplitude * std::cos(phase);
        else if (i < 6) signal = amplitude * std::sin(phase);
        const double base = 10.0 * static_cast<double>(i + 1);
        ds.add({specs[i].id, key, r, 0, hour(r), base * (1.0 + signal + nd(eng))});
      }
    }
  }
  return ds;
}

}  // namespace vbtest
