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
#include <vector>

namespace varbench::stats {

/// Mean computed around the first element, so a constant input returns that
/// constant exactly.
double mean(std::span<const double> x);

/// Population (1/N) standard deviation.
double pop_stddev(std::span<const double> x);

/// Population standard deviation over mean, in percent. Caller checks the
/// mean is non-zero.
double rsd(std::span<const double> x);

/// Linear interpolation between closest ranks, h = (n-1)p, p in [0,1].
double quantile(std::span<const double> x, double p);

/// Pearson correlation. Returns 0 when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Central differences on interior points, one-sided at both ends.
std::vector<double> gradient(std::span<const double> x);

}  // namespace varbench::stats
