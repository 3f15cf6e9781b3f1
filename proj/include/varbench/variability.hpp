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

#include "varbench/model.hpp"

namespace varbench {

struct VIWeights {
  double w_b = 1.0 / 3.0;
  double w_d = 1.0 / 3.0;
  double w_s = 1.0 / 3.0;

  /// Each weight in [0,1], sum 1 within 1e-9. Throws Error(kInvalidArgument).
  void validate() const;

  friend bool operator==(const VIWeights&, const VIWeights&) = default;
};

struct VIResult {
  double breadth = 0.0;
  double dispersion = 0.0;
  double speed = 0.0;
  double vi = 0.0;
  std::size_t n_points = 0;
  double threshold = 0.0;
  VIWeights weights;
};

/// v_i = (x_i - mean) / mean * 100. Needs >= 2 points and a non-zero mean.
std::vector<double> variation_vector(std::span<const double> x);

/// Keeps deviations in the unfavourable direction beyond t*100 percent:
/// HIB keeps v < -t*100, LIB keeps v > t*100, others become 0.
std::vector<double> change_vector(std::span<const double> v, Direction direction, double t);

/// |mean(C)|.
double breadth(std::span<const double> c);

/// Population RSD in percent. Needs >= 2 points and a non-zero mean.
double dispersion(std::span<const double> x);

/// Population standard deviation of the central-difference gradient over the
/// mean, in percent. Needs >= 3 points and a non-zero mean.
double speed(std::span<const double> x);

/// w_b*breadth + w_d*dispersion + w_s*speed.
double combine(double breadth, double dispersion, double speed, const VIWeights& w = {});

VIResult vi(std::span<const double> x, Direction direction, double t = 0.0,
            const VIWeights& w = {});

struct VIRow {
  VmKey vm;
  std::string metric;
  VIResult result;
};

struct VISkip {
  VmKey vm;
  std::string metric;
  ErrorCode reason;
};

struct VIGroup {
  std::string provider;
  VmClass vm_class = VmClass::kC1;
  std::string vm_type;
  double breadth = 0.0;
  double dispersion = 0.0;
  double speed = 0.0;
  double vi = 0.0;
  std::size_t n_series = 0;
  std::size_t n_skipped = 0;
};

struct VIReport {
  std::vector<VIRow> rows;      // one per computable (vm, metric) series
  std::vector<VIGroup> groups;  // one per provider x class x type, sorted
  std::vector<VISkip> skipped;  // ZeroMean / TooShort series
};

/// Per-series VI for every (vm, metric) in the dataset, then the uniform mean
/// over all series of each provider x class x type group. Throws Error(kEmptyGroup)
/// when a group present in the dataset has no computable series.
VIReport aggregate_vi(const Dataset& dataset, double t = 0.0, const VIWeights& w = {},
                      const Catalog& catalog = catalog_default());

}  // namespace varbench
